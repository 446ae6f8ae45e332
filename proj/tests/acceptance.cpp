// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "copulascore/cli/commands.hpp"
#include "copulascore/copulas.hpp"
#include "copulascore/dist_math.hpp"
#include "copulascore/inference.hpp"
#include "copulascore/rng.hpp"
#include "copulascore/scoring.hpp"
#include "copulascore/sim_harness.hpp"
#include "oracles.hpp"

using namespace copulascore;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr int kReps = 2000;
constexpr double kAlpha = 0.05;

// Criterion 1
constexpr double kSizeJointTarget = 4.8;
constexpr double kSizeJointTol = 1.5;
constexpr double kSizeStepTarget = 2.4;
constexpr double kSizeStepTol = 1.2;
// Criterion 2
constexpr double kPowerEqualTarget = 90.9;
constexpr double kPowerEqualTol = 2.5;
constexpr double kPowerLexTarget = 95.2;
constexpr double kPowerLexTol = 2.0;
constexpr double kPowerMargTarget = 2.3;
constexpr double kPowerMargTol = 1.2;
// Criterion 3
constexpr double kAttribMargTarget = 70.0;
constexpr double kAttribMargTol = 3.0;
constexpr double kAttribCopMax = 5.0;
// Criterion 5
constexpr double kCvTol = 1e-6;
constexpr double kSizeIdentityTol = 1e-7;
constexpr int kRandomMatrices = 50;
// Criterion 6
constexpr int kDecompCases = 10000;
constexpr double kDecompTol = 1e-12;
constexpr double kHacTol = 1e-14;
constexpr double kEquicorrTol = 1e-10;
// Criterion 7
constexpr std::size_t kMixSamples = 100000;
constexpr double kForbiddenMass = 0.001;
constexpr double kWitness = 0.2;
constexpr int kGrid = 101;
// Criterion 8
constexpr int kProprietyDraws = 1000000;
constexpr double kProprietySe = 3.0;

struct Check {
    bool ok = true;
    std::vector<std::string> notes;
    void expect(bool cond, const std::string& what) {
        if (!cond) ok = false;
        notes.push_back(fmt::format("{}{}", cond ? "" : "!", what));
    }
};

std::string within(double v, double target, double tol) {
    return fmt::format("{:.2f} in {:.1f}+-{:.1f}", v, target, tol);
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

using Key = std::pair<SettingLabel, int>;

std::map<Key, FreqTable> run_all() {
    std::map<Key, FreqTable> out;
    for (int n : {150, 300}) {
        for (auto s : {SettingLabel::I, SettingLabel::II, SettingLabel::III, SettingLabel::IV,
                       SettingLabel::V}) {
            DgpSpec spec;
            spec.n = n;
            ExperimentOptions opt;
            opt.alpha = kAlpha;
            out.emplace(Key{s, n}, run_experiment(spec, Setting::standard(s), kReps, kSeed, opt));
        }
    }
    return out;
}

Check criterion1(const std::map<Key, FreqTable>& t) {
    Check c;
    const auto& tab = t.at({SettingLabel::I, 150});
    for (auto h : {Hypothesis::Equal, Hypothesis::LexSuperiority}) {
        const auto& r = tab.row(h);
        const auto name = to_string(h);
        c.expect(near(r.joint_pct(), kSizeJointTarget, kSizeJointTol),
                 name + " joint " + within(r.joint_pct(), kSizeJointTarget, kSizeJointTol));
        c.expect(near(r.marginal_pct(), kSizeStepTarget, kSizeStepTol),
                 name + " M " + within(r.marginal_pct(), kSizeStepTarget, kSizeStepTol));
        c.expect(near(r.copula_pct(), kSizeStepTarget, kSizeStepTol),
                 name + " C " + within(r.copula_pct(), kSizeStepTarget, kSizeStepTol));
    }
    return c;
}

Check criterion2(const std::map<Key, FreqTable>& t) {
    Check c;
    const auto& tab = t.at({SettingLabel::II, 300});
    const auto& eq = tab.row(Hypothesis::Equal);
    const auto& lex = tab.row(Hypothesis::LexSuperiority);
    c.expect(near(eq.joint_pct(), kPowerEqualTarget, kPowerEqualTol),
             "equal joint " + within(eq.joint_pct(), kPowerEqualTarget, kPowerEqualTol));
    c.expect(near(lex.joint_pct(), kPowerLexTarget, kPowerLexTol),
             "lex joint " + within(lex.joint_pct(), kPowerLexTarget, kPowerLexTol));
    for (const auto* r : {&eq, &lex}) {
        c.expect(near(r->marginal_pct(), kPowerMargTarget, kPowerMargTol),
                 to_string(r->hypothesis) + " M " +
                     within(r->marginal_pct(), kPowerMargTarget, kPowerMargTol));
    }
    return c;
}

Check criterion3(const std::map<Key, FreqTable>& t) {
    Check c;
    const auto& tab = t.at({SettingLabel::IV, 300});
    for (auto h : {Hypothesis::Equal, Hypothesis::LexSuperiority}) {
        const auto& r = tab.row(h);
        c.expect(near(r.marginal_pct(), kAttribMargTarget, kAttribMargTol),
                 to_string(h) + " M " +
                     within(r.marginal_pct(), kAttribMargTarget, kAttribMargTol));
        c.expect(r.copula_pct() <= kAttribCopMax,
                 fmt::format("{} C {:.2f} <= {:.1f}", to_string(h), r.copula_pct(),
                             kAttribCopMax));
    }
    return c;
}

Check criterion4(const std::map<Key, FreqTable>& t) {
    Check c;
    const std::vector<SettingLabel> power{SettingLabel::II, SettingLabel::III, SettingLabel::IV,
                                          SettingLabel::V};
    for (int n : {150, 300}) {
        for (auto h : {Hypothesis::Equal, Hypothesis::LexSuperiority}) {
            const double p2 = t.at({SettingLabel::II, n}).row(h).joint_pct();
            const double p3 = t.at({SettingLabel::III, n}).row(h).joint_pct();
            c.expect(p2 > p3, fmt::format("n={} {} ii {:.2f} > iii {:.2f}", n, to_string(h), p2, p3));
        }
        for (auto s : power) {
            const auto& tab = t.at({s, n});
            const double eq = tab.row(Hypothesis::Equal).joint_pct();
            const double lex = tab.row(Hypothesis::LexSuperiority).joint_pct();
            c.expect(lex >= eq, fmt::format("n={} {} lex {:.2f} >= equal {:.2f}", n,
                                            to_string(s), lex, eq));
        }
    }
    for (auto s : power) {
        for (auto h : {Hypothesis::Equal, Hypothesis::LexSuperiority}) {
            const double a = t.at({s, 150}).row(h).joint_pct();
            const double b = t.at({s, 300}).row(h).joint_pct();
            c.expect(b > a, fmt::format("{} {} 150:{:.2f} < 300:{:.2f}", to_string(s),
                                        to_string(h), a, b));
        }
    }
    return c;
}

Check criterion5() {
    Check c;
    const LongRunCov id{1.0, 0.0, 1.0};
    const double q1 = oracle::quantile_bisect(1.0 - kAlpha / 4.0);
    const double eq_c2 = oracle::quantile_bisect(1.0 - (kAlpha / 2.0) / (2.0 * (1.0 - kAlpha / 2.0)));
    const double lex_c2 = oracle::quantile_bisect(1.0 - (kAlpha / 2.0) / (1.0 - kAlpha / 2.0));
    const auto eq = critical_values(id, kAlpha, Hypothesis::Equal);
    const auto lex = critical_values(id, kAlpha, Hypothesis::LexSuperiority);
    c.expect(near(eq.c1, q1, kCvTol), fmt::format("c1 {:.7f} vs {:.7f}", eq.c1, q1));
    c.expect(near(eq.c2, eq_c2, kCvTol), fmt::format("equal c2 {:.7f} vs {:.7f}", eq.c2, eq_c2));
    c.expect(near(lex.c2, lex_c2, kCvTol), fmt::format("lex c2 {:.7f} vs {:.7f}", lex.c2, lex_c2));

    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> var(0.05, 20.0);
    std::uniform_real_distribution<double> corr(-0.97, 0.97);
    double worst = 0.0;
    for (int k = 0; k < kRandomMatrices; ++k) {
        const double a = var(gen), b = var(gen);
        const LongRunCov om{a, corr(gen) * std::sqrt(a * b), b};
        for (auto h : {Hypothesis::Equal, Hypothesis::LexSuperiority}) {
            const auto cv = critical_values(om, kAlpha, h);
            worst = std::max(worst, std::abs(two_step_size(om, cv, h) - kAlpha));
        }
    }
    c.expect(worst <= kSizeIdentityTol, fmt::format("size identity max err {:.2e}", worst));
    return c;
}

Check criterion6() {
    Check c;
    std::mt19937_64 gen(6);
    std::uniform_int_distribution<int> dim_dist(2, 8);
    std::uniform_real_distribution<double> sd_dist(0.05, 3.0);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int k = 0; k < kDecompCases; ++k) {
        const int d = dim_dist(gen);
        std::uniform_real_distribution<double> rho_dist(-1.0 / (d - 1) + 1e-3, 0.99);
        std::vector<double> sd(static_cast<std::size_t>(d)), y(sd.size());
        for (std::size_t i = 0; i < sd.size(); ++i) {
            sd[i] = sd_dist(gen);
            y[i] = 1.5 * sd[i] * nd(gen);
        }
        const MarginalForecast f(sd);
        const CopulaForecast cf = GaussianCopula{EquiCorr(d, rho_dist(gen))};
        worst = std::max(worst, std::abs(s_joint(cf, f, y) - s_marg(f, y) - s_cop(cf, f, y)));
    }
    c.expect(worst <= kDecompTol, fmt::format("decomposition max err {:.2e}", worst));

    double hac_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> m(100), cc(100);
        for (std::size_t t = 0; t < m.size(); ++t) {
            m[t] = 0.3 + nd(gen);
            cc[t] = -1.0 + 0.5 * nd(gen);
        }
        long double mm = 0, mc = 0;
        for (std::size_t t = 0; t < m.size(); ++t) {
            mm += m[t];
            mc += cc[t];
        }
        mm /= 100.0L;
        mc /= 100.0L;
        long double smm = 0, smc = 0, scc = 0;
        for (std::size_t t = 0; t < m.size(); ++t) {
            smm += (m[t] - mm) * (m[t] - mm);
            smc += (m[t] - mm) * (cc[t] - mc);
            scc += (cc[t] - mc) * (cc[t] - mc);
        }
        const auto om = hac_cov(ScoreDiffSeries(m, cc), HacConfig{});
        hac_err = std::max({hac_err, std::abs(om.s_mm - static_cast<double>(smm / 100.0L)),
                            std::abs(om.s_mc - static_cast<double>(smc / 100.0L)),
                            std::abs(om.s_cc - static_cast<double>(scc / 100.0L))});
    }
    c.expect(hac_err <= kHacTol, fmt::format("hac m=0 max err {:.2e}", hac_err));

    double eq_err = 0.0;
    for (int d = 2; d <= 8; ++d) {
        for (double rho : {-0.1, 0.0, 0.25, 0.5, 0.9}) {
            const EquiCorr ec(d, rho);
            const auto dense = oracle::equicorr_dense(d, rho);
            const double ld = oracle::logdet(dense);
            eq_err = std::max(eq_err, std::abs(equicorr_logdet(ec) - ld) / std::max(1.0, std::abs(ld)));
            std::vector<double> z(static_cast<std::size_t>(d));
            for (double& v : z) v = nd(gen);
            const double q = oracle::quadform(dense, z);
            eq_err = std::max(eq_err, std::abs(equicorr_quadform(ec, z) - q) / std::max(1.0, std::abs(q)));
        }
    }
    c.expect(eq_err <= kEquicorrTol, fmt::format("equicorrelation max rel err {:.2e}", eq_err));
    return c;
}

Check criterion7() {
    Check c;
    for (const char* base : {"independence", "gaussian:0.5", "countermonotone"}) {
        const auto sample = copula_sample(
            Copula::mixture(cli::parse_base_copula(base), MixDirection::UpperRight), kMixSamples, 7);
        std::size_t forbidden = 0;
        for (std::size_t i = 0; i < sample.rows(); ++i) {
            const bool a = sample(i, 0) > 0.5;
            const bool b = sample(i, 1) > 0.5;
            if (a != b) ++forbidden;
        }
        const double mass = static_cast<double>(forbidden) / kMixSamples;
        c.expect(mass <= kForbiddenMass, fmt::format("{} forbidden mass {:.5f}", base, mass));
    }

    const ExtendedCopula pi(Copula::independence(2));
    const ExtendedCopula m(Copula::comonotone(2));
    double witness = 0.0, ur_gap = 0.0, lr_gap = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            const double u1 = i / (kGrid - 1.0), u2 = j / (kGrid - 1.0);
            witness = std::max(witness,
                               std::abs(mixture_cdf(pi, MixDirection::UpperRight, u1, u2) - u1 * u2));
            ur_gap = std::max(ur_gap, std::abs(mixture_cdf(m, MixDirection::UpperRight, u1, u2) -
                                               std::min(u1, u2)));
            lr_gap = std::max(lr_gap, std::abs(mixture_cdf(m, MixDirection::LowerRight, u1, u2) -
                                               std::min(u1, u2)));
        }
    }
    c.expect(witness >= kWitness, fmt::format("independence witness {:.4f}", witness));
    c.expect(ur_gap == 0.0, fmt::format("comonotone ur gap {:.1e}", ur_gap));
    c.expect(lr_gap > 0.0, fmt::format("comonotone lr gap {:.4f}", lr_gap));
    return c;
}

Check criterion8() {
    Check c;
    const EquiCorr truth(2, 0.5);
    const MarginalForecast f({1.0, 1.0});
    const CopulaForecast ct = GaussianCopula{truth};
    const CopulaForecast alternatives[] = {GaussianCopula{EquiCorr(2, 0.2)},
                                           GaussianCopula{EquiCorr(2, 0.8)}};
    Rng rng(8);
    double sum[2] = {0, 0}, sumsq[2] = {0, 0};
    std::vector<double> y(2);
    for (int k = 0; k < kProprietyDraws; ++k) {
        sample_equicorr_normal(truth, rng, y);
        const double s0 = s_cop(ct, f, y);
        for (int a = 0; a < 2; ++a) {
            const double g = s_cop(alternatives[a], f, y) - s0;
            sum[a] += g;
            sumsq[a] += g * g;
        }
    }
    const char* names[] = {"rho=0.2", "rho=0.8"};
    for (int a = 0; a < 2; ++a) {
        const double mean = sum[a] / kProprietyDraws;
        const double se = std::sqrt((sumsq[a] / kProprietyDraws - mean * mean) / kProprietyDraws);
        c.expect(mean > kProprietySe * se,
                 fmt::format("{} gap {:.5f} = {:.1f} se", names[a], mean, mean / se));
    }
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_cli(std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "copulascore");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
}

Check criterion9() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "copulascore_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };

    std::vector<std::string> outputs;
    for (const auto& [tag, threads] :
         std::vector<std::pair<std::string, std::string>>{{"a", "1"}, {"b", "1"}, {"c", "4"}}) {
        std::string out;
        const int code = run_cli({"simulate", "--setting", "ii", "--n", "150", "--reps", "200",
                                  "--seed", "1", "--threads", threads, "--out", p("sim_" + tag),
                                  "--emit-scores", p("scores_" + tag + ".csv")},
                                 out);
        c.expect(code == 0, "simulate exit " + std::to_string(code));
        outputs.push_back(out + slurp(p("sim_" + tag + ".csv")) + slurp(p("sim_" + tag + ".json")) +
                          slurp(p("scores_" + tag + ".csv")));
    }
    c.expect(outputs[0] == outputs[1], "simulate identical across runs");
    c.expect(outputs[0] == outputs[2], "simulate identical across thread counts");

    std::string cmp1, cmp2;
    run_cli({"compare", "--scores", p("scores_a.csv"), "--cumdiff", p("cum1.csv")}, cmp1);
    run_cli({"compare", "--scores", p("scores_a.csv"), "--cumdiff", p("cum2.csv")}, cmp2);
    c.expect(!cmp1.empty() && cmp1 == cmp2 && slurp(p("cum1.csv")) == slurp(p("cum2.csv")),
             "compare identical across runs");

    std::string ignored;
    for (const char* name : {"demo1.csv", "demo2.csv"}) {
        run_cli({"cxls-demo", "--base", "gaussian:0.5", "--direction", "lr", "--samples", "1000",
                 "--seed", "3", "--out", p(name)},
                ignored);
    }
    const std::string demo = slurp(p("demo1.csv"));
    c.expect(demo.size() > 20 && demo == slurp(p("demo2.csv")), "cxls-demo identical across runs");
    fs::remove_all(dir);
    return c;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::string& title, const Check& c) {
        std::string detail;
        for (const auto& n : c.notes) detail += (detail.empty() ? "" : "; ") + n;
        fmt::print("{} criterion {}: {} [{}]\n", c.ok ? "PASS" : "FAIL", id, title, detail);
        std::fflush(stdout);
        if (!c.ok) ++failures;
    };

    const auto tables = run_all();
    report(1, "size under setting (i), n=150", criterion1(tables));
    report(2, "power under setting (ii), n=300", criterion2(tables));
    report(3, "attribution under setting (iv), n=300", criterion3(tables));
    report(4, "power orderings across settings and sample sizes", criterion4(tables));
    report(5, "critical-value closed forms and size identity", criterion5());
    report(6, "exact identities", criterion6());
    report(7, "copula mixture counterexamples", criterion7());
    report(8, "propriety of the copula score", criterion8());
    report(9, "determinism across runs and thread counts", criterion9());
    fmt::print("{} of 9 criteria passed\n", 9 - failures);
    return failures;
}
