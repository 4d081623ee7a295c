#include "relight/oracle.hpp"
#include "relight/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace relight {

void validate(const RatingDistribution& d) {
    double sum = 0.0;
    for (double p : d.probs) {
        if (!(p >= 0.0)) throw ShapeError("rating probability must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ShapeError("rating probabilities must sum to 1");
}

double expected_score(const RatingDistribution& d) {
    double e = 0.0;
    for (int k = 0; k < 10; ++k) e += (k + 1) * d.probs[k];
    return e;
}

double aesthetic_mean_opinion_score(double f1, double f2, double f3, double f4) {
    return 0.288 * f1 + 0.288 * f2 + 0.082 * f3 + 0.342 * f4;
}

// ---------------------------------------------------------------------------
// proxy

ProxyOracle::ProxyOracle(ProxyParams params) : params_(params) {}

ProxyOracle::Components ProxyOracle::components(const ImageTensor& img) const {
    const std::size_t n = img.pixel_count();
    double lum_sum = 0.0, lum_sq_sum = 0.0, sat_sum = 0.0;
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = img.data[i * 3 + 0];
        const double g = img.data[i * 3 + 1];
        const double b = img.data[i * 3 + 2];
        const double y = (r + g + b) / 3.0;
        lum_sum += y;
        lum_sq_sum += y * y;
        sat_sum += std::max({r, g, b}) - std::min({r, g, b});
        const double lo = std::min({r, g, b});
        const double hi = std::max({r, g, b});
        if (lo < params_.clip_lo || hi > params_.clip_hi) ++clipped;
    }
    Components c{};
    c.mean_luminance = lum_sum / static_cast<double>(n);
    const double var = std::max(0.0, lum_sq_sum / static_cast<double>(n) - c.mean_luminance * c.mean_luminance);
    c.luminance_std = std::sqrt(var);
    c.mean_saturation = sat_sum / static_cast<double>(n);
    c.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);

    const double span = 1.0 - params_.target_luminance; // distance to the far end of [0,1]
    c.quality = params_.w_exposure * std::max(0.0, 1.0 - std::abs(c.mean_luminance - params_.target_luminance) / span) +
                params_.w_contrast * std::min(1.0, c.luminance_std / params_.contrast_scale) +
                params_.w_saturation * std::min(1.0, c.mean_saturation / params_.saturation_scale) +
                params_.w_clip * (1.0 - c.clip_fraction);
    c.rating_mean = 1.0 + 9.0 * c.quality;
    return c;
}

RatingDistribution ProxyOracle::score(const ImageTensor& img) {
    const Components c = components(img);
    RatingDistribution d;
    double sum = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double r = static_cast<double>(k + 1) - c.rating_mean;
        d.probs[k] = std::exp(-(r * r) / (2.0 * params_.sigma * params_.sigma));
        sum += d.probs[k];
    }
    for (double& p : d.probs) p /= sum;
    return d;
}

// ---------------------------------------------------------------------------
// external process

ExternalOracle::ExternalOracle(std::string command, double timeout_s)
    : command_(std::move(command)), timeout_s_(timeout_s) {
    if (command_.empty()) throw ConfigError("external oracle command is empty");
    scratch_dir_ = std::filesystem::temp_directory_path() /
                   ("relight-oracle-" + std::to_string(::getpid()));
    std::filesystem::create_directories(scratch_dir_);
    start();
}

ExternalOracle::~ExternalOracle() {
    stop();
    std::error_code ec;
    std::filesystem::remove_all(scratch_dir_, ec);
}

void ExternalOracle::start() {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw Error("pipe() failed for external oracle");

    const pid_t pid = fork();
    if (pid < 0) throw Error("fork() failed for external oracle");
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    child_pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
}

void ExternalOracle::stop() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (child_pid_ > 0) {
        kill(child_pid_, SIGTERM);
        int status = 0;
        waitpid(child_pid_, &status, 0);
        child_pid_ = -1;
    }
}

RatingDistribution ExternalOracle::score(const ImageTensor& img) {
    std::scoped_lock lock(mutex_);

    const std::filesystem::path req =
        scratch_dir_ / ("req-" + std::to_string(request_count_++) + ".png");
    save_image(img, req);

    const std::string line = req.string() + "\n";
    ssize_t written = write(to_child_, line.data(), line.size());
    if (written != static_cast<ssize_t>(line.size())) {
        std::error_code ec;
        std::filesystem::remove(req, ec);
        throw OracleError("external oracle stdin closed (child exited?)");
    }

    // read one full response line, honoring the timeout
    std::string response;
    const double deadline_ms = timeout_s_ * 1000.0;
    double waited_ms = 0.0;
    for (;;) {
        const std::size_t nl = read_buffer_.find('\n');
        if (nl != std::string::npos) {
            response = read_buffer_.substr(0, nl);
            read_buffer_.erase(0, nl + 1);
            break;
        }
        struct pollfd pfd {from_child_, POLLIN, 0};
        const int pr = poll(&pfd, 1, 100);
        waited_ms += 100.0;
        if (pr < 0) throw OracleError("poll() failed waiting for external oracle");
        if (pr == 0) {
            if (waited_ms >= deadline_ms)
                throw OracleError("external oracle timed out after " + std::to_string(timeout_s_) + "s",
                                  read_buffer_);
            continue;
        }
        char buf[4096];
        const ssize_t n = read(from_child_, buf, sizeof(buf));
        if (n <= 0) throw OracleError("external oracle closed its output", read_buffer_);
        read_buffer_.append(buf, static_cast<std::size_t>(n));
    }

    std::error_code ec;
    std::filesystem::remove(req, ec);

    std::istringstream parse(response);
    RatingDistribution d;
    double sum = 0.0;
    for (int k = 0; k < 10; ++k) {
        if (!(parse >> d.probs[k]) || !std::isfinite(d.probs[k]) || d.probs[k] < 0.0)
            throw OracleError("external oracle response is not 10 non-negative floats", response);
        sum += d.probs[k];
    }
    std::string extra;
    if (parse >> extra) throw OracleError("external oracle response has trailing tokens", response);
    if (sum <= 0.0) throw OracleError("external oracle response sums to zero", response);
    for (double& p : d.probs) p /= sum;
    return d;
}

// ---------------------------------------------------------------------------
// cache

namespace {
std::uint64_t content_hash(const ImageTensor& img) {
    // FNV-1a over dimensions and raw pixel bytes
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const unsigned char* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    const std::int64_t dims[2] = {img.height, img.width};
    mix(reinterpret_cast<const unsigned char*>(dims), sizeof(dims));
    mix(reinterpret_cast<const unsigned char*>(img.data.data()), img.data.size() * sizeof(double));
    return h;
}
} // namespace

CachingOracle::CachingOracle(std::unique_ptr<Oracle> inner, std::size_t max_entries)
    : inner_(std::move(inner)), max_entries_(max_entries) {}

RatingDistribution CachingOracle::score(const ImageTensor& img) {
    const std::uint64_t key = content_hash(img);
    {
        std::scoped_lock lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++hits_;
            return it->second;
        }
    }
    RatingDistribution d = inner_->score(img);
    {
        std::scoped_lock lock(mutex_);
        if (cache_.size() >= max_entries_) cache_.clear();
        cache_.emplace(key, d);
        ++misses_;
    }
    return d;
}

std::unique_ptr<Oracle> make_oracle(const OracleConfig& config) {
    std::unique_ptr<Oracle> inner;
    if (config.kind == OracleConfig::Kind::proxy)
        inner = std::make_unique<ProxyOracle>(config.proxy);
    else
        inner = std::make_unique<ExternalOracle>(config.external_cmd, config.timeout_s);
    return std::make_unique<CachingOracle>(std::move(inner));
}

} // namespace relight
