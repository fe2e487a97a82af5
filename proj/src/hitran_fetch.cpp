#include "thzgs/hitran/fetch.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <openssl/evp.h>

namespace thzgs::hitran {

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& data) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << data;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Advisory lock held for the lifetime of the object; serializes writers of
// one cache key across processes.
class KeyLock {
 public:
  explicit KeyLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot open lock " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw std::runtime_error("cannot lock " + path.string());
    }
  }
  ~KeyLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  KeyLock(const KeyLock&) = delete;
  KeyLock& operator=(const KeyLock&) = delete;

 private:
  int fd_;
};

struct ParsedEndpoint {
  std::string host_port;  // scheme://host:port
  std::string path;       // leading /
};

ParsedEndpoint split_endpoint(const std::string& endpoint) {
  const std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw std::invalid_argument("endpoint must include a scheme: " + endpoint);
  const std::size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string download(GasSpecies gas, const Band& widened,
                     const FetchOptions& options) {
  const ParsedEndpoint ep = split_endpoint(options.endpoint);
  std::string key;
  if (options.api_key)
    key = *options.api_key;
  else if (const char* env = std::getenv("THZGS_HITRAN_KEY"))
    key = env;

  char query[256];
  std::snprintf(query, sizeof(query),
                "?molecule_id=%d&numin=%.6f&numax=%.6f&format=par",
                molecule_id(gas), thz_to_wavenumber(widened.f_low_thz),
                thz_to_wavenumber(widened.f_high_thz));
  std::string target = ep.path + query;
  if (!key.empty()) target += "&apikey=" + key;

  std::string last_error = "no attempt made";
  int backoff_ms = options.backoff_initial_ms;
  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Client client(ep.host_port);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    httplib::Result res = client.Get(target);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    // Client errors will not improve on retry; server errors might.
    if (res->status < 500) throw HttpStatus(res->status);
    last_error = "HTTP status " + std::to_string(res->status);
  }
  throw NetworkError("fetch failed after " +
                     std::to_string(options.attempts) +
                     " attempts: " + last_error);
}

}  // namespace

std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                 GasSpecies gas, const Band& widened_band) {
  char name[96];
  std::snprintf(name, sizeof(name), "%.6f-%.6f.par", widened_band.f_low_thz,
                widened_band.f_high_thz);
  return cache_dir / std::to_string(molecule_id(gas)) / name;
}

LineCatalog fetch_lines(GasSpecies gas, const Band& band,
                        const FetchOptions& options, FetchReport* report) {
  const double lo = std::max(0.1, band.f_low_thz - options.band_margin_thz);
  const double hi = std::min(10.0, band.f_high_thz + options.band_margin_thz);
  const Band widened{lo, hi};

  const std::filesystem::path path =
      cache_path(options.cache_dir, gas, widened);
  const std::filesystem::path sidecar = path.string() + ".sha256";
  std::filesystem::create_directories(path.parent_path());
  KeyLock lock(path.string() + ".lock");

  std::string payload;
  bool from_cache = false;
  if (std::filesystem::exists(path) && std::filesystem::exists(sidecar)) {
    payload = read_file(path);
    std::string expected = read_file(sidecar);
    while (!expected.empty() &&
           (expected.back() == '\n' || expected.back() == '\r'))
      expected.pop_back();
    if (sha256_hex(payload) == expected) {
      from_cache = true;
    } else if (!options.refetch_on_corrupt) {
      throw CacheCorrupt("checksum mismatch for " + path.string());
    }
  }

  if (!from_cache) {
    payload = download(gas, widened, options);
    write_file_atomic(path, payload);
    write_file_atomic(sidecar, sha256_hex(payload) + "\n");
    if (report) ++report->downloads;
  } else if (report) {
    ++report->cache_hits;
  }

  std::istringstream stream(payload);
  ParFileResult parsed =
      parse_par_file(stream, from_cache ? path.string() : options.endpoint);
  auto it = parsed.catalogs.find(molecule_id(gas));
  if (it == parsed.catalogs.end())
    throw EmptyCatalog("fetched payload has no lines for " +
                       std::string(to_string(gas)));
  LineCatalog catalog = filter_band(it->second, widened, 0.0);
  normalize_catalog(catalog);
  catalog.coverage = widened;
  return catalog;
}

}  // namespace thzgs::hitran
