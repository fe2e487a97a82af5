#ifndef THZGS_HITRAN_FETCH_HPP
#define THZGS_HITRAN_FETCH_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "thzgs/hitran/catalog.hpp"

namespace thzgs::hitran {

struct NetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HttpStatus : std::runtime_error {
  int code;
  explicit HttpStatus(int status)
      : std::runtime_error("HTTP status " + std::to_string(status)),
        code(status) {}
};

struct CacheCorrupt : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FetchOptions {
  std::string endpoint;                 // e.g. "http://host:port/lbl/api"
  std::filesystem::path cache_dir;
  std::optional<std::string> api_key;   // falls back to $THZGS_HITRAN_KEY
  double band_margin_thz = 0.1;         // band widened by this on each side
  int attempts = 3;                     // with exponential backoff
  int backoff_initial_ms = 250;
  bool refetch_on_corrupt = true;       // otherwise CacheCorrupt is thrown
};

struct FetchReport {
  int downloads = 0;    // network requests that transferred a payload
  int cache_hits = 0;
};

// Cache key for a (gas, band) request: <cache_dir>/<molecule_id>/
// <f_low>-<f_high>.par with a .sha256 sidecar. Frequencies are the widened
// band bounds in THz, printed with %.6f so the key is stable.
std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                 GasSpecies gas, const Band& widened_band);

// Download (or reuse the cached copy of) the line list for one gas over the
// band widened by the margin, then parse it into a catalog restricted to the
// widened band. A warm cache performs zero network requests. Concurrent
// fetches of the same key are serialized through a per-key file lock.
LineCatalog fetch_lines(GasSpecies gas, const Band& band,
                        const FetchOptions& options,
                        FetchReport* report = nullptr);

}  // namespace thzgs::hitran

#endif  // THZGS_HITRAN_FETCH_HPP
