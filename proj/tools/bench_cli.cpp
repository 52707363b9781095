// Benchmark harness: synthetic-matrix timing sweeps with per-phase
// profiling and exact op counters, emitted as CSV. Also hosts a fast
// self-check mode (--verify) for CI and smoke runs.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "biqgemm/baselines.hpp"
#include "biqgemm/kernel.hpp"
#include "biqgemm/lut.hpp"
#include "biqgemm/matrix.hpp"
#include "biqgemm/model_io.hpp"
#include "biqgemm/quantize.hpp"

using namespace biqgemm;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5EED;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double checksum(const Matrix<float>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.rows() * y.cols(); ++i) acc += y.data()[i];
    return acc;
}

struct Scenario {
    std::size_t m, n, b;
    unsigned beta, mu;
    std::size_t threads;
};

struct Record {
    Scenario s;
    std::string method;
    std::uint64_t seed;
    int repeats, warmup;
    double wall_ms = 0, build_ms = 0, query_ms = 0, replace_ms = 0;
    OpCounters ops;
    double sum = 0;
    bool correct_values = true;
};

const char* kCsvHeader =
    "m,n,b,beta,mu,threads,method,seed,repeats,warmup,"
    "wall_ms,build_ms,query_ms,replace_ms,"
    "lut_build_ops,lookups,accumulate_ops,fma_ops,checksum";

void write_record(std::ostream& out, const Record& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%zu,%zu,%zu,%u,%u,%zu,%s,%llu,%d,%d,"
                  "%.4f,%.4f,%.4f,%.4f,%llu,%llu,%llu,%llu,",
                  r.s.m, r.s.n, r.s.b, r.s.beta, r.s.mu, r.s.threads,
                  r.method.c_str(), (unsigned long long)r.seed, r.repeats,
                  r.warmup, r.wall_ms, r.build_ms, r.query_ms, r.replace_ms,
                  (unsigned long long)r.ops.lut_build_ops,
                  (unsigned long long)r.ops.lookups,
                  (unsigned long long)r.ops.accumulate_ops,
                  (unsigned long long)r.ops.fma_ops);
    out << buf;
    if (r.correct_values) {
        std::snprintf(buf, sizeof buf, "%.9e", r.sum);
        out << buf;
    } else {
        out << "NA";
    }
    out << '\n';
}

struct BenchConfig {
    std::vector<std::size_t> m{1024}, n{1024}, b{32}, threads{1};
    std::vector<unsigned> beta{1}, mu{8};
    std::vector<std::string> methods{"biqgemm"};
    int repeats = 10;
    int warmup = 3;
    std::uint64_t seed = kDefaultSeed;
    std::size_t budget_bytes = 32 * 1024;
    bool deterministic = false;
};

Record run_scenario(const Scenario& s, const std::string& method,
                    const BenchConfig& cfg) {
    Record rec;
    rec.s = s;
    rec.method = method;
    rec.seed = cfg.seed;
    rec.repeats = cfg.repeats;
    rec.warmup = cfg.warmup;

    auto w = Matrix<float>::random_uniform(s.m, s.n, cfg.seed);
    auto x = Matrix<float>::random_normal(s.n, s.b, cfg.seed + 1);
    auto q = quantize_greedy(w, s.beta);
    auto model = pack_linear(q, s.mu);

    std::vector<std::vector<std::uint32_t>> plane_words;
    for (const auto& plane : q.planes) plane_words.push_back(pack_plane_words(plane));

    KernelOptions opts;
    opts.threads = s.threads;
    opts.deterministic = cfg.deterministic;
    opts.budget_bytes = cfg.budget_bytes;
    const TileShape tile =
        plan_tiles(s.m, model.keys[0].groups, s.b, s.mu, cfg.budget_bytes, sizeof(float));

    struct Sample {
        double wall;
        KernelStats stats;
        double sum;
        bool correct;
    };
    auto run_once = [&]() -> Sample {
        Sample smp{0, {}, 0, true};
        const auto t0 = Clock::now();
        if (method == "biqgemm") {
            auto y = biqgemm::biqgemm(model, x, tile, &smp.stats, opts);
            smp.sum = checksum(y);
        } else if (method == "gemm_dense") {
            auto y = gemm_dense(dequantize(q), x, &smp.stats.ops);
            smp.sum = checksum(y);
        } else if (method == "gemm_unpack") {
            Matrix<float> y(s.m, s.b);
            for (unsigned i = 0; i < s.beta; ++i) {
                auto yp = gemm_unpack(plane_words[i], s.m, s.n, x, &smp.stats.ops);
                for (std::size_t r = 0; r < s.m; ++r) {
                    for (std::size_t c = 0; c < s.b; ++c) {
                        y(r, c) += q.alphas[i][r] * yp(r, c);
                    }
                }
            }
            smp.sum = checksum(y);
        } else if (method == "bandwidth_probe") {
            for (unsigned i = 0; i < s.beta; ++i) {
                auto probe = gemm_bandwidth_probe(plane_words[i], s.m, s.n, x);
                smp.stats.ops += probe.ops;
            }
            smp.correct = false;
        } else {
            throw CLI::ValidationError("--method", "unknown method " + method);
        }
        smp.wall = elapsed_ms(t0);
        return smp;
    };

    for (int i = 0; i < cfg.warmup; ++i) run_once();
    std::vector<Sample> samples;
    samples.reserve(cfg.repeats);
    for (int i = 0; i < cfg.repeats; ++i) samples.push_back(run_once());
    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.wall < b.wall; });
    const Sample& med = samples[samples.size() / 2];

    rec.wall_ms = med.wall;
    rec.build_ms = med.stats.build_seconds * 1e3;
    rec.query_ms = med.stats.query_seconds * 1e3;
    rec.replace_ms = med.stats.replace_seconds * 1e3;
    rec.ops = med.stats.ops;
    rec.sum = med.sum;
    rec.correct_values = med.correct;
    return rec;
}

// ---- self-check mode --------------------------------------------------------

int fail(const std::string& what) {
    std::cerr << "[FAIL] " << what << '\n';
    return 1;
}

int run_verify(const std::vector<unsigned>& mus, std::uint64_t seed,
               bool inject_pack_fault) {
    for (unsigned mu : mus) {
        if (mu < 1 || mu > 8) {
            std::cerr << "verify: mu=" << mu
                      << " out of range [1,8] for exhaustive checks\n";
            return 2;
        }
    }
    int failures = 0;
    std::mt19937_64 rng(seed);

    // codec bijection, exhaustive per mu
    for (unsigned mu : mus) {
        std::vector<bool> seen(std::size_t(1) << mu, false);
        for (std::uint32_t k = 0; k < (1u << mu); ++k) {
            std::vector<int> signs(mu);
            for (unsigned t = 0; t < mu; ++t) signs[t] = (k >> t) & 1u ? +1 : -1;
            std::uint32_t enc = encode_key(signs.data(), mu);
            if (inject_pack_fault) enc = (enc + 1) & ((1u << mu) - 1);
            if (enc >= (1u << mu) || seen[enc] || enc != k) {
                failures += fail("codec bijection violated at mu=" + std::to_string(mu) +
                                 " key=" + std::to_string(k));
                break;
            }
            seen[enc] = true;
        }
        if (inject_pack_fault) break;
    }

    // dp vs naive
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (unsigned mu : mus) {
        const std::size_t table = std::size_t(1) << mu;
        std::vector<double> x(mu), dp(table), naive(table);
        for (int rep = 0; rep < 10; ++rep) {
            for (auto& v : x) v = dist(rng);
            build_lut_dp(x.data(), mu, dp.data());
            build_lut_naive(x.data(), mu, naive.data());
            for (std::size_t k = 0; k < table; ++k) {
                if (std::abs(dp[k] - naive[k]) > 1e-12 * std::max(1.0, std::abs(naive[k]))) {
                    failures += fail("dp/naive mismatch at mu=" + std::to_string(mu));
                    rep = 10;
                    break;
                }
            }
        }
    }

    // oracle equivalence + counter laws on small shapes
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t m = 1 + rng() % 32;
        const std::size_t n = 1 + rng() % 48;
        const std::size_t b = 1 + rng() % 6;
        const unsigned beta = 1 + unsigned(rng() % 3);
        const unsigned mu = mus[rng() % mus.size()];
        const std::size_t groups = (n + mu - 1) / mu;
        const std::uint64_t case_seed = rng();

        auto w = Matrix<float>::random_uniform(m, n, case_seed);
        auto x = Matrix<float>::random_normal(n, b, case_seed + 1);
        auto q = quantize_greedy(w, beta);
        auto model = pack_linear(q, mu);
        KernelStats stats;
        auto y = biqgemm::biqgemm(model, x, TileShape{1 + rng() % groups, 1 + rng() % m}, &stats);
        auto ref = gemm_dense(dequantize(q), x);
        const double norm = std::max(1e-30, frobenius_norm(ref));
        if (frobenius_distance(y, ref) / norm > 1e-4) {
            failures += fail("oracle equivalence at m=" + std::to_string(m) +
                             " n=" + std::to_string(n) + " seed=" +
                             std::to_string(case_seed));
        }
        if (stats.ops.lookups != std::uint64_t(m) * groups * b * beta ||
            stats.ops.lut_build_ops !=
                ((std::uint64_t(1) << mu) + mu - 1) * groups * b) {
            failures += fail("counter law at m=" + std::to_string(m) +
                             " n=" + std::to_string(n) + " seed=" +
                             std::to_string(case_seed));
        }
    }

    // footprint pins
    const unsigned bits[] = {32, 8, 6, 4, 3, 2};
    const double want[] = {1.049, 0.262, 0.197, 0.131, 0.098, 0.066};
    for (int i = 0; i < 6; ++i) {
        const double mb = footprint(512, 512, bits[i]).weight_mb();
        if (std::round(mb * 1000.0) / 1000.0 != want[i]) {
            failures += fail("footprint at bits=" + std::to_string(bits[i]));
        }
    }

    // model round-trips
    for (int i = 0; i < 10; ++i) {
        const std::size_t m = 1 + rng() % 8;
        const std::size_t n = 1 + rng() % 16;
        const unsigned mu = mus[rng() % mus.size()];
        auto q = quantize_greedy(Matrix<float>::random_uniform(m, n, rng()), 2);
        auto loaded = load(save(q, mu));
        if (loaded.keys != pack_linear(q, mu).keys) {
            failures += fail("model round-trip at i=" + std::to_string(i));
        }
    }

    if (failures == 0) {
        std::cout << "verify: all checks passed\n";
        return 0;
    }
    std::cerr << "verify: " << failures << " check(s) failed\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BiQGEMM benchmark harness"};

    BenchConfig cfg;
    std::string csv_path;
    bool verify = false;
    bool inject_pack_fault = false;

    app.add_option("--m", cfg.m, "output sizes")->delimiter(',');
    app.add_option("--n", cfg.n, "input sizes")->delimiter(',');
    app.add_option("--b", cfg.b, "batch sizes")->delimiter(',');
    app.add_option("--beta", cfg.beta, "quantization bits")->delimiter(',');
    app.add_option("--mu", cfg.mu, "LUT-unit sizes")->delimiter(',');
    app.add_option("--threads", cfg.threads, "worker counts")->delimiter(',');
    app.add_option("--method", cfg.methods,
                   "biqgemm|gemm_dense|gemm_unpack|bandwidth_probe")
        ->delimiter(',');
    app.add_option("--repeats", cfg.repeats, "timed repeats (median reported)")
        ->check(CLI::PositiveNumber);
    app.add_option("--warmup", cfg.warmup, "discarded warmup iterations")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--budget-bytes", cfg.budget_bytes,
                   "per-worker lookup-table working-set budget");
    app.add_flag("--deterministic", cfg.deterministic,
                 "fixed reduction order (default for tests, off for speed)");
    app.add_option("--csv", csv_path, "write records to this file (default stdout)");
    app.add_flag("--verify", verify, "run correctness self-checks and exit");
    app.add_flag("--inject-pack-fault", inject_pack_fault,
                 "test hook: corrupt the key codec inside --verify")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    for (unsigned mu : cfg.mu) {
        if (mu < 1 || mu > kMaxLutUnit) {
            std::cerr << "error: mu=" << mu << " out of range [1,16]\n";
            return 2;
        }
    }

    if (verify) {
        return run_verify(cfg.mu, cfg.seed, inject_pack_fault);
    }

    std::ofstream file;
    if (!csv_path.empty()) {
        file.open(csv_path);
        if (!file) {
            std::cerr << "error: cannot open " << csv_path << '\n';
            return 2;
        }
    }
    std::ostream& out = csv_path.empty() ? std::cout : file;
    out << kCsvHeader << '\n';

    try {
        for (std::size_t m : cfg.m)
            for (std::size_t n : cfg.n)
                for (std::size_t b : cfg.b)
                    for (unsigned beta : cfg.beta)
                        for (unsigned mu : cfg.mu)
                            for (std::size_t threads : cfg.threads)
                                for (const auto& method : cfg.methods) {
                                    Scenario s{m, n, b, beta, mu, threads};
                                    write_record(out, run_scenario(s, method, cfg));
                                }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
