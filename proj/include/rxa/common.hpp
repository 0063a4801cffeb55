#pragma once

// Shared basics: complex baseband signals, error taxonomy, deterministic
// RNG streams, and a chunked parallel-for used by the batched NN ops.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace rxa {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error kinds map onto CLI exit codes: ValueError -> 1, DataError -> 2,
// TrainingError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValueError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct TrainingError : Error {
    using Error::Error;
};
// Raised by packet detection when no autocorrelation peak clears the threshold.
struct NoPacketError : DataError {
    using DataError::DataError;
};

// A finite complex baseband sample sequence with its sample rate.
struct IQSignal {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;

    IQSignal() = default;
    IQSignal(std::vector<cplx> s, double fs) : samples(std::move(s)), sample_rate_hz(fs) {}

    std::size_t size() const { return samples.size(); }

    void validate() const {
        if (samples.empty()) throw ValueError("IQSignal: empty sample sequence");
        if (!(sample_rate_hz > 0.0)) throw ValueError("IQSignal: sample_rate_hz must be positive");
        for (const auto& s : samples) {
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw ValueError("IQSignal: non-finite sample");
        }
    }

    double energy() const {
        double e = 0.0;
        for (const auto& s : samples) e += std::norm(s);
        return e;
    }

    double mean_power() const { return samples.empty() ? 0.0 : energy() / double(samples.size()); }
};

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }

// FNV-1a over (master seed || label). Every randomized component draws from
// its own stream so that adding a component never perturbs the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](unsigned char b) {
        h ^= b;
        h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>((master >> (8 * i)) & 0xff));
    for (char c : label) mix(static_cast<unsigned char>(c));
    return h;
}

// Deterministic random stream. Gaussians use an explicit Box-Muller on
// mt19937_64 uniforms so draws do not depend on the stdlib's
// normal_distribution implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return double(gen_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t integer(std::uint64_t n) {
        if (n == 0) throw ValueError("Rng::integer: n must be > 0");
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    // complex gaussian with E|z|^2 = 1
    cplx cgaussian_unit() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-std::log(u1));
        return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(integer(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Persistent worker pool. Thread count is min(hardware, RXA_THREADS); the
// chunk decomposition is independent of the thread count, so results are
// bit-identical for any pool size.
class ThreadPool {
    struct Job {
        const std::function<void(std::size_t)>* fn = nullptr;
        std::size_t total = 0;
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> remaining{0};
    };

  public:
    static ThreadPool& instance() {
        static ThreadPool pool;
        return pool;
    }

    std::size_t size() const { return workers_.size() + 1; }  // workers + caller

    // Runs fn(chunk_idx) for chunk_idx in [0, n_chunks). Blocks until done.
    // Not reentrant from inside a job.
    void run(std::size_t n_chunks, const std::function<void(std::size_t)>& fn) {
        if (n_chunks == 0) return;
        if (workers_.empty() || n_chunks == 1) {
            for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
            return;
        }
        auto job = std::make_shared<Job>();
        job->fn = &fn;
        job->total = n_chunks;
        job->remaining.store(n_chunks, std::memory_order_relaxed);
        {
            std::unique_lock<std::mutex> lk(mu_);
            current_ = job;
        }
        cv_.notify_all();
        drain(*job);  // caller participates
        while (job->remaining.load(std::memory_order_acquire) != 0) std::this_thread::yield();
        {
            std::unique_lock<std::mutex> lk(mu_);
            if (current_ == job) current_.reset();
        }
    }

    ~ThreadPool() {
        {
            std::unique_lock<std::mutex> lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : workers_) t.join();
    }

  private:
    ThreadPool() {
        std::size_t n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
        if (const char* env = std::getenv("RXA_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v >= 1) n = std::min<std::size_t>(n, std::size_t(v));
        }
        for (std::size_t i = 1; i < n; ++i) workers_.emplace_back([this] { worker_main(); });
    }

    static void drain(Job& job) {
        while (true) {
            std::size_t idx = job.next.fetch_add(1, std::memory_order_relaxed);
            if (idx >= job.total) break;
            (*job.fn)(idx);
            job.remaining.fetch_sub(1, std::memory_order_release);
        }
    }

    void worker_main() {
        std::shared_ptr<Job> last;
        while (true) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock<std::mutex> lk(mu_);
                cv_.wait(lk, [&] { return stop_ || (current_ && current_ != last); });
                if (stop_) return;
                job = current_;
            }
            last = job;
            if (job) drain(*job);
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::shared_ptr<Job> current_;
    bool stop_ = false;
};

// Chunked parallel loop over [0, n_items). fn(chunk_idx, begin, end).
// The chunk grid depends only on n_items and chunk_size.
inline void parallel_chunks(std::size_t n_items, std::size_t chunk_size,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n_items == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    ThreadPool::instance().run(n_chunks, [&](std::size_t c) {
        std::size_t begin = c * chunk_size;
        std::size_t end = std::min(begin + chunk_size, n_items);
        fn(c, begin, end);
    });
}

inline std::size_t n_chunks_for(std::size_t n_items, std::size_t chunk_size) {
    if (n_items == 0) return 0;
    if (chunk_size == 0) chunk_size = 1;
    return (n_items + chunk_size - 1) / chunk_size;
}

}  // namespace rxa
