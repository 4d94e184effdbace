#include "metrics.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "sha256.hpp"

namespace owc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint32_t kCacheFormatVersion = 1;
constexpr char kCacheMagic[4] = {'O', 'W', 'C', 'M'};

}  // namespace

double dc_gain(const ImpulseResponse& ir) {
    double s = 0.0;
    for (double b : ir.bins) s += b;
    return s;
}

std::complex<double> frequency_response(const ImpulseResponse& ir,
                                        double f_hz) {
    if (f_hz == 0.0) return {dc_gain(ir), 0.0};
    // One complex rotation per bin; bin centers are uniformly spaced.
    double w0 = -kTwoPi * f_hz * (ir.t0_s + 0.5 * ir.bin_width_s);
    std::complex<double> phase(std::cos(w0), std::sin(w0));
    double dw = -kTwoPi * f_hz * ir.bin_width_s;
    std::complex<double> step(std::cos(dw), std::sin(dw));
    std::complex<double> acc{};
    for (double p : ir.bins) {
        if (p != 0.0) acc += p * phase;
        phase *= step;
    }
    return acc;
}

double bandwidth_3db(const ImpulseResponse& ir, BwConvention convention) {
    double h0 = dc_gain(ir);
    if (h0 <= 0.0) throw ZeroChannelError{};
    double ratio = convention == BwConvention::Optical
                       ? 1.0 / std::numbers::sqrt2
                       : std::pow(2.0, -0.25);
    double target = ratio * h0;

    constexpr double kScanStep = 10e6;
    constexpr double kScanMax = 50e9;
    constexpr double kRefine = 1e6;

    auto mag = [&](double f) { return std::abs(frequency_response(ir, f)); };

    const long n_steps = std::lround(kScanMax / kScanStep);
    for (long k = 1; k <= n_steps; ++k) {
        double f = double(k) * kScanStep;
        if (mag(f) <= target) {
            double lo = double(k - 1) * kScanStep, hi = f;
            while (hi - lo > kRefine) {
                double mid = 0.5 * (lo + hi);
                if (mag(mid) <= target) hi = mid;
                else lo = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return kBandwidthUnbounded;
}

double rms_delay_spread(const ImpulseResponse& ir) {
    double p_sum = 0.0, t_sum = 0.0, t2_sum = 0.0;
    for (size_t k = 0; k < ir.bins.size(); ++k) {
        double p = ir.bins[k];
        if (p == 0.0) continue;
        double t = ir.t0_s + (k + 0.5) * ir.bin_width_s;
        p_sum += p;
        t_sum += p * t;
        t2_sum += p * t * t;
    }
    if (p_sum <= 0.0) throw ZeroChannelError{};
    double mean = t_sum / p_sum;
    double var = t2_sum / p_sum - mean * mean;
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

std::string channel_hash_hex(const Scenario& s, const MatrixBuildOptions& o) {
    std::string key = canonical_json(s);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "|order=%d|elem1=%.17g|elem2=%.17g|bin=%.17g|window=%.17g"
                  "|bwconv=%d|v=%u",
                  o.bounce.max_order, o.bounce.elem_size_bounce1,
                  o.bounce.elem_size_bounce2, o.bounce.time_bin_s,
                  o.bounce.time_window_s, static_cast<int>(o.bw_convention),
                  kCacheFormatVersion);
    key += buf;
    return sha256_hex(key);
}

namespace {

ChannelMatrix trace_matrix(const Scenario& s, const MatrixBuildOptions& o) {
    ChannelMatrix m;
    m.num_users = s.num_users();
    m.num_branches = s.num_branches();
    m.num_aps = s.num_aps();
    m.bands = s.bands;
    for (int w = 0; w < kNumWavelengths; ++w)
        m.unit_power_w[w] = s.unit_power_w(static_cast<Wavelength>(w));
    m.links.resize(size_t(m.num_users) * m.num_branches * m.num_aps);

    std::vector<SurfaceElement> elems1, elems2;
    if (o.bounce.max_order >= 1)
        elems1 = discretize(s.room, o.bounce.elem_size_bounce1);
    if (o.bounce.max_order >= 2)
        elems2 = discretize(s.room, o.bounce.elem_size_bounce2);

    size_t total = m.links.size();
    std::atomic<size_t> next{0};
    std::atomic<int> extended{0};

    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= total) return;
            int ap = int(i % m.num_aps);
            int branch = int((i / m.num_aps) % m.num_branches);
            int user = int(i / (size_t(m.num_aps) * m.num_branches));
            bool ext = false;
            LinkMetrics& lm = m.links[i];
            lm.ir = impulse_response(s.units[ap], s.users[user].position,
                                     s.branches[branch], elems1, elems2,
                                     o.bounce, &ext);
            if (ext) extended.fetch_add(1);
            lm.dc_gain = dc_gain(lm.ir);
            lm.bw_3db_hz = lm.dc_gain > 0.0
                               ? bandwidth_3db(lm.ir, o.bw_convention)
                               : 0.0;
            lm.delay_spread_s =
                lm.dc_gain > 0.0 ? rms_delay_spread(lm.ir) : 0.0;
        }
    };

    unsigned nthreads = o.threads > 0
                            ? unsigned(o.threads)
                            : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, std::max<size_t>(total, 1));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    m.window_extended_links = extended.load();
    return m;
}

// --- binary cache ----------------------------------------------------------

struct Writer {
    std::string buf;
    void raw(const void* p, size_t n) {
        buf.append(static_cast<const char*>(p), n);
    }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void f64(double v) { raw(&v, 8); }
};

struct Reader {
    const char* p;
    const char* end;
    bool fail = false;
    void raw(void* out, size_t n) {
        if (p + n > end) { fail = true; std::memset(out, 0, n); return; }
        std::memcpy(out, p, n);
        p += n;
    }
    std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
    double f64() { double v; raw(&v, 8); return v; }
};

std::string serialize_matrix(const ChannelMatrix& m) {
    Writer w;
    w.u32(std::uint32_t(m.num_users));
    w.u32(std::uint32_t(m.num_branches));
    w.u32(std::uint32_t(m.num_aps));
    w.u32(std::uint32_t(m.window_extended_links));
    for (int i = 0; i < kNumWavelengths; ++i) {
        w.f64(m.bands[i].power_per_ld_w);
        w.f64(m.bands[i].responsivity);
        w.f64(m.unit_power_w[i]);
    }
    for (const LinkMetrics& lm : m.links) {
        w.f64(lm.dc_gain);
        w.f64(lm.bw_3db_hz);
        w.f64(lm.delay_spread_s);
        w.f64(lm.ir.bin_width_s);
        w.f64(lm.ir.t0_s);
        w.u64(lm.ir.bins.size());
        if (!lm.ir.bins.empty())
            w.raw(lm.ir.bins.data(), lm.ir.bins.size() * sizeof(double));
    }
    return std::move(w.buf);
}

std::optional<ChannelMatrix> deserialize_matrix(std::string_view data) {
    Reader r{data.data(), data.data() + data.size()};
    ChannelMatrix m;
    m.num_users = int(r.u32());
    m.num_branches = int(r.u32());
    m.num_aps = int(r.u32());
    m.window_extended_links = int(r.u32());
    if (r.fail || m.num_users < 0 || m.num_branches < 0 || m.num_aps < 0)
        return std::nullopt;
    for (int i = 0; i < kNumWavelengths; ++i) {
        m.bands[i].power_per_ld_w = r.f64();
        m.bands[i].responsivity = r.f64();
        m.unit_power_w[i] = r.f64();
    }
    size_t n = size_t(m.num_users) * m.num_branches * m.num_aps;
    if (n > (1u << 24)) return std::nullopt;
    m.links.resize(n);
    for (LinkMetrics& lm : m.links) {
        lm.dc_gain = r.f64();
        lm.bw_3db_hz = r.f64();
        lm.delay_spread_s = r.f64();
        lm.ir.bin_width_s = r.f64();
        lm.ir.t0_s = r.f64();
        std::uint64_t nb = r.u64();
        if (r.fail || nb > (1u << 28)) return std::nullopt;
        lm.ir.bins.resize(size_t(nb));
        if (nb) r.raw(lm.ir.bins.data(), size_t(nb) * sizeof(double));
    }
    if (r.fail || r.p != r.end) return std::nullopt;
    return m;
}

std::array<std::uint8_t, 32> hash_bytes_from_hex(const std::string& hex) {
    std::array<std::uint8_t, 32> out{};
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return 0;
    };
    for (size_t i = 0; i + 1 < hex.size() && i / 2 < out.size(); i += 2)
        out[i / 2] = std::uint8_t(nib(hex[i]) << 4 | nib(hex[i + 1]));
    return out;
}

// RAII advisory lock (single writer / multi reader).
struct FileLock {
    int fd = -1;
    FileLock(const std::string& path, int op) {
        fd = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd >= 0) ::flock(fd, op);
    }
    ~FileLock() {
        if (fd >= 0) {
            ::flock(fd, LOCK_UN);
            ::close(fd);
        }
    }
};

}  // namespace

void write_cache(const std::string& path, const std::string& hash_hex,
                 const ChannelMatrix& m) {
    std::string payload = serialize_matrix(m);
    FileLock lock(path + ".lock", LOCK_EX);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write cache file: " + tmp);
        out.write(kCacheMagic, 4);
        std::uint32_t v = kCacheFormatVersion;
        out.write(reinterpret_cast<const char*>(&v), 4);
        auto hb = hash_bytes_from_hex(hash_hex);
        out.write(reinterpret_cast<const char*>(hb.data()), hb.size());
        std::uint64_t len = payload.size();
        out.write(reinterpret_cast<const char*>(&len), 8);
        out.write(payload.data(), std::streamsize(payload.size()));
        if (!out) throw IoError("cache write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ChannelMatrix> read_cache(const std::string& path,
                                        const std::string& hash_hex) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    FileLock lock(path + ".lock", LOCK_SH);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (content.size() < 4 + 4 + 32 + 8) return std::nullopt;
    if (std::memcmp(content.data(), kCacheMagic, 4) != 0) return std::nullopt;
    std::uint32_t v;
    std::memcpy(&v, content.data() + 4, 4);
    if (v != kCacheFormatVersion) return std::nullopt;
    auto want = hash_bytes_from_hex(hash_hex);
    if (std::memcmp(content.data() + 8, want.data(), 32) != 0)
        return std::nullopt;
    std::uint64_t len;
    std::memcpy(&len, content.data() + 40, 8);
    if (content.size() != 48 + len) return std::nullopt;
    return deserialize_matrix(std::string_view(content).substr(48));
}

ChannelMatrix build_channel_matrix(const Scenario& s,
                                   const MatrixBuildOptions& o) {
    std::string hash = channel_hash_hex(s, o);
    std::optional<std::string> cache_path;
    if (o.cache_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*o.cache_dir, ec);
        if (!ec) cache_path = *o.cache_dir + "/" + hash + ".owcm";
    }

    if (cache_path) {
        try {
            if (auto m = read_cache(*cache_path, hash)) return std::move(*m);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: channel cache read failed (%s)\n",
                         e.what());
        }
    }

    ChannelMatrix m = trace_matrix(s, o);

    if (cache_path) {
        try {
            write_cache(*cache_path, hash, m);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: channel cache write failed (%s)\n",
                         e.what());
        }
    }
    return m;
}

}  // namespace owc
