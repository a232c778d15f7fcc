// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails.

#include "rtvae/cli/config.hpp"
#include "rtvae/divergences/divergences.hpp"
#include "rtvae/eval/auc.hpp"
#include "rtvae/eval/sweep.hpp"

#include "support.hpp"

#include <fmt/format.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace rtvae;

const fs::path kSource = RTVAE_SOURCE_DIR;

int failures = 0;

void report(int id, const char* status, const std::string& name, const std::string& detail) {
    fmt::print("{} criterion {}: {} ({})\n", status, id, name, detail);
    std::fflush(stdout);
}

void verdict(int id, bool ok, const std::string& name, const std::string& detail) {
    report(id, ok ? "PASS" : "FAIL", name, detail);
    failures += ok ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void gradient_correctness() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240601);
    double worst_standard = 0.0;
    double worst_robust = 0.0;
    const int draws = 100;
    for (int i = 0; i < draws; ++i) {
        const Architecture arch =
            testing::random_architecture(rng, 1 + rng.uniform_index(3), 1 + rng.uniform_index(3));
        const ModelParams params = init_params(arch, rng);
        const std::size_t rows = 1 + rng.uniform_index(6);
        const Matrix batch = testing::random_encoded_rows(rng, arch.layout, rows);
        const Matrix noise = rng.normal_matrix(rows, arch.latent_dim);
        worst_standard = std::max(
            worst_standard, testing::total_loss_gradient_error(arch, params, batch, Beta(0.0), noise));
        const Beta beta(std::pow(10.0, -4.0 * rng.uniform()));
        worst_robust = std::max(
            worst_robust, testing::total_loss_gradient_error(arch, params, batch, beta, noise));
    }
    const double secs = seconds_since(start);
    verdict(1, worst_standard <= 1e-4 && worst_robust <= 1e-4 && secs < 60.0,
            "total_loss gradients match central differences",
            fmt::format("{} draws per path, max rel err beta=0 {:.2e}, beta>0 {:.2e}, {:.1f} s",
                        draws, worst_standard, worst_robust, secs));
}

void small_beta_consistency() {
    Rng rng(7);
    const double betas[] = {1e-3, 1e-4, 1e-5};
    bool monotone = true;
    double worst_cat = 0.0;
    double worst_gauss = 0.0;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> p;
        do {
            const double a = 0.1 + 0.8 * rng.uniform();
            p = {a, 1.0 - a};
        } while (p[1] < 0.1 || p[1] > 0.9);
        const std::size_t t = rng.uniform_index(2);
        const double residual = 6.0 * rng.uniform() - 3.0;
        double prev_cat = INFINITY;
        double prev_gauss = INFINITY;
        for (double b : betas) {
            const double cat = std::abs(categorical_beta_ce(p, t, b) - 1.0 - categorical_ce(p, t));
            const double gauss =
                std::abs(gaussian_beta_ce(residual, 0.0, 1.0, b) - gaussian_nll(residual, 0.0, 1.0));
            monotone = monotone && cat < prev_cat && gauss < prev_gauss;
            prev_cat = cat;
            prev_gauss = gauss;
        }
        worst_cat = std::max(worst_cat, prev_cat);
        worst_gauss = std::max(worst_gauss, prev_gauss);
    }
    verdict(2, monotone && worst_cat <= 1e-2 && worst_gauss <= 1e-2,
            "beta-losses converge to the standard losses as beta -> 0",
            fmt::format("200 draws, monotone {}, gap at 1e-5: categorical {:.2e}, gaussian {:.2e}",
                        monotone, worst_cat, worst_gauss));
}

void bounded_influence() {
    bool ok = true;
    std::string detail;
    for (double b : {0.01, 0.1, 1.0}) {
        const double v = gaussian_beta_ce(1e6, 0.0, 1.0, b);
        const double bound = (b + 1.0) / b;
        ok = ok && std::abs(v - bound) <= 1e-9;
        detail += fmt::format("beta {:g}: {:.12g} vs {:.12g}; ", b, v, bound);
    }
    const double nll = gaussian_nll(1e6, 0.0, 1.0);
    ok = ok && nll > 1e11;
    verdict(3, ok, "gaussian beta-loss saturates at (beta+1)/beta",
            detail + fmt::format("gaussian_nll {:.3e}", nll));
}

double brute_force_auc(const std::vector<double>& s, const std::vector<Label>& l) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (l[i] == Label::anomaly && l[j] == Label::normal) {
                pairs += 1.0;
                wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / pairs;
}

void auc_oracle() {
    Rng rng(99);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + rng.uniform_index(49);
        std::vector<double> s(n);
        std::vector<Label> l(n);
        for (std::size_t k = 0; k < n; ++k) {
            s[k] = static_cast<double>(rng.uniform_index(10)) / 4.0;
            l[k] = rng.uniform() < 0.4 ? Label::anomaly : Label::normal;
        }
        l[0] = Label::anomaly;
        l[1] = Label::normal;
        worst = std::max(worst, std::abs(auc(s, l) - brute_force_auc(s, l)));
    }
    using L = Label;
    const double perfect = auc(std::vector<double>{0.1, 0.2, 0.8, 0.9},
                               std::vector<L>{L::normal, L::normal, L::anomaly, L::anomaly});
    const double ties = auc(std::vector<double>{0.5, 0.5, 0.5, 0.5},
                            std::vector<L>{L::normal, L::anomaly, L::normal, L::anomaly});
    const double four = auc(std::vector<double>{0.1, 0.4, 0.35, 0.8},
                            std::vector<L>{L::normal, L::normal, L::anomaly, L::anomaly});
    verdict(4, worst <= 1e-12 && perfect == 1.0 && ties == 0.5 && four == 0.75,
            "fast AUC equals all-pairs AUC",
            fmt::format("200 sets, max diff {:.1e}; hand cases {} / {} / {}", worst, perfect, ties,
                        four));
}

void point_values() {
    const std::vector<double> half{0.5, 0.5};
    const std::vector<double> hot{1.0, 0.0, 0.0};
    const double a = categorical_beta_ce(half, 0, 1.0);
    const double b = categorical_beta_ce(hot, 0, 1.0);
    const double c = gaussian_beta_ce(0.0, 0.0, 1.0, 1.0);
    const double d = kl_gaussian_standard(Matrix(1, 1, 1.0), Matrix(1, 1, 0.0));
    verdict(5,
            std::abs(a - 1.5) <= 1e-12 && std::abs(b - 1.0) <= 1e-12 &&
                std::abs(c - 1.202115) <= 1e-6 && std::abs(d - 0.5) <= 1e-12,
            "loss formula point values",
            fmt::format("{:.15g}, {:.15g}, {:.9g}, {:.15g}", a, b, c, d));
}

void synthetic_phenomenon() {
    const auto start = std::chrono::steady_clock::now();
    const cli::ExperimentConfig cfg = cli::load_config(kSource / "configs" / "synthetic_sweep.toml");
    const SweepResult r = contamination_sweep(cfg.sweep_config());
    const double secs = seconds_since(start);
    fmt::print("{}", r.plot_csv());
    if (!r.failures.empty()) {
        verdict(6, false, "contamination sweep on synthetic data", r.failures.front());
        return;
    }
    const double vae0 = r.mean_auc(0.0, Variant::vae);
    const double vae10 = r.mean_auc(0.10, Variant::vae);
    const double vae5 = r.mean_auc(0.05, Variant::vae);
    const double rt0 = r.mean_auc(0.0, Variant::rtvae);
    const double rt5 = r.mean_auc(0.05, Variant::rtvae);
    const bool a = vae0 - vae10 >= 0.05;
    const bool b = std::abs(rt5 - rt0) <= 0.03;
    const bool c = rt5 - vae5 >= 0.05;
    verdict(6, a && b && c && secs <= 600.0, "contamination sweep on synthetic data",
            fmt::format("(a) VAE drop 0->0.10 {:.4f} {}; (b) RTVAE change 0->0.05 {:.4f} {}; "
                        "(c) gap at 0.05 {:.4f} {}; {:.0f} s on {} thread(s)",
                        vae0 - vae10, a ? "ok" : "low", rt5 - rt0, b ? "ok" : "high", rt5 - vae5,
                        c ? "ok" : "low", secs, cfg.threads));
}

void real_data_check() {
    const fs::path cfg_path = kSource / "configs" / "nsl_kdd_sweep.toml";
    const cli::ExperimentConfig cfg = cli::load_config(cfg_path);
    if (!fs::exists(cfg.data.train) || !fs::exists(cfg.data.test)) {
        report(7, "SKIP", "NSL-KDD contamination check",
               "data not present; run scripts/fetch_nsl_kdd.sh to enable");
        return;
    }
    const SweepResult r = contamination_sweep(cfg.sweep_config());
    if (!r.failures.empty()) {
        verdict(7, false, "NSL-KDD contamination check", r.failures.front());
        return;
    }
    const double vae = r.mean_auc(0.05, Variant::vae);
    const double rt = r.mean_auc(0.05, Variant::rtvae);
    verdict(7, rt - vae >= 0.02, "NSL-KDD contamination check",
            fmt::format("VAE {:.4f}, RTVAE {:.4f}, margin {:.4f}", vae, rt, rt - vae));
}

int run_command(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism() {
    testing::TempDir dir("acceptance_determinism");
    testing::write_file(dir / "experiment.toml", R"(
seed = 3
threads = 2

[data]
train_rows = 1000

[synthetic]
normals = 1000
anomalies = 200
test_normals = 300
test_anomalies = 300

[train]
batch_size = 32
max_epochs = 3
continuous_head = "linear"
observation_sigma = 0.25

[sweep]
rates = [0.0, 0.05]
seeds = [3, 4]
rtvae_beta = "grid"
save_models = true
)");
    std::vector<fs::path> outs{dir / "run1", dir / "run2"};
    for (const auto& out : outs) {
        const int code = run_command(fmt::format("{} --config {} --out-dir {} experiment",
                                                 RTVAE_CLI_PATH, (dir / "experiment.toml").string(),
                                                 out.string()));
        if (code != 0) {
            verdict(8, false, "experiment output is byte-identical across runs",
                    fmt::format("experiment exited with {}", code));
            return;
        }
    }
    std::size_t files = 0;
    std::size_t mismatched = 0;
    for (const auto& entry : fs::recursive_directory_iterator(outs[0])) {
        if (!entry.is_regular_file()) {
            continue;
        }
        ++files;
        const fs::path twin = outs[1] / fs::relative(entry.path(), outs[0]);
        if (!fs::exists(twin) ||
            testing::read_file(entry.path()) != testing::read_file(twin)) {
            ++mismatched;
        }
    }
    const bool complete = files == 2 + 8;
    verdict(8, complete && mismatched == 0, "experiment output is byte-identical across runs",
            fmt::format("{} files compared, {} differ", files, mismatched));
}

} // namespace

int main() {
    gradient_correctness();
    small_beta_consistency();
    bounded_influence();
    auc_oracle();
    point_values();
    synthetic_phenomenon();
    real_data_check();
    determinism();
    fmt::print("{} criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
