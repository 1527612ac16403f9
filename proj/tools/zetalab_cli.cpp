// zetalab: command-line front end for the experiments.
//
// Exit codes: 0 success, 1 internal failure, 2 usage, 3 domain/capability/
// configuration/table errors, 4 I/O.

#include <zetalab.hpp>

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace zl = zetalab;

namespace {

struct Params {
    std::vector<double> k;
    double t0 = 0, t1 = 0, nodes_per_unit = zl::kMinNodesPerUnit;
    double T = 0, x = 0, x_exponent = 0;
    long long samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> support;
    int max_weight = 0;
    double t = 0;
    long long nodes = 0;
    double ratio = 0, threshold = 0, base = 0;
    std::string scheme = "plain";
    std::uint64_t prime_limit = 100'000;
    int m_terms = 20;
    long long N = 10'000;
    double X = 0;
    double tol = 1e-10;
    std::string l_cache;
    bool no_cache = false;
    std::string format = "csv";
    std::string out;
};

struct UsageError {
    std::string what;
};

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + zl::format_number(v[i]);
    return s;
}

class Runner {
public:
    Runner(CLI::App& app, const Params& p) : app_(app), p_(p) {}

    zl::Table run(const std::string& cmd)
    {
        table_.set("tool", std::string("zetalab"));
        table_.set("version", std::string(zl::kVersion));
        table_.set("generated_at", zl::utc_timestamp());
        table_.set("subcommand", cmd);
        if (cmd == "moment") moment();
        else if (cmd == "prop1") prop1();
        else if (cmd == "prop2") prop2();
        else if (cmd == "split") split();
        else if (cmd == "random-model") random_model();
        else if (cmd == "constants") constants();
        else if (cmd == "quadratic") quadratic();
        table_.set("seed", std::to_string(p_.seed));
        return table_;
    }

private:
    bool given(const char* name) const { return app_.get_option(name)->count() > 0; }

    void need(const std::string& cmd, std::initializer_list<const char*> names) const
    {
        for (const char* n : names)
            if (!given(n)) throw UsageError{cmd + ": missing required option " + n};
    }

    zl::PrimeTable primes(double reach) const
    {
        const double limit = std::max(100.0, std::ceil(reach));
        if (limit > static_cast<double>(zl::kMaxSieveLimit))
            zl::detail::raise<zl::InsufficientTableError>("needs primes up to " + zl::format_number(limit) +
                                                          ", beyond the sieve limit 1e9");
        return zl::load_or_sieve(static_cast<std::uint64_t>(limit), !p_.no_cache);
    }

    void moment()
    {
        need("moment", {"--k", "--t0", "--t1"});
        table_.set("k", join(p_.k));
        table_.set("t0", p_.t0);
        table_.set("t1", p_.t1);
        table_.set("nodes_per_unit", p_.nodes_per_unit);
        table_.columns = {"k", "t0", "t1", "value", "nodes", "max_node_spacing", "normalized", "ratio_t_log_t"};
        for (const auto& m : zl::moment_quadrature(p_.k, p_.t0, p_.t1, p_.nodes_per_unit))
            table_.rows.push_back({m.k, m.t0, m.t1, m.value, static_cast<long long>(m.nodes), m.max_node_spacing,
                                   m.value / (m.t1 - m.t0), m.value / (m.t0 * std::log(m.t0))});
    }

    void prop1()
    {
        need("prop1", {"--T"});
        if (given("--x") == given("--x-exponent")) throw UsageError{"prop1: give exactly one of --x, --x-exponent"};
        const long long samples = given("--samples") ? p_.samples : 1000;
        const double x = given("--x") ? p_.x : std::pow(p_.T, p_.x_exponent);
        zl::detail::require(samples >= 1, "prop1: need samples >= 1");
        zl::detail::require(p_.T >= 10.0 && 2.0 * p_.T <= zl::kMaxHeight, "prop1: need 10 <= T <= 5e7");
        table_.set("T", p_.T);
        table_.set("x", x);
        table_.set("samples", std::to_string(samples));
        const auto bound = zl::prop1_polys(x, p_.T, primes(std::min(x, p_.T * p_.T)));
        zl::UniformStream u(p_.seed, 0);
        table_.columns = {"t", "rhs", "log_abs_zeta", "deficit"};
        double min_def = std::numeric_limits<double>::infinity();
        long long ok = 0;
        for (long long s = 0; s < samples; ++s) {
            const double t = p_.T + p_.T * u.next();
            const double rhs = bound(t);
            const double lz = std::log(zl::zeta_abs(t));
            const double def = rhs - lz;
            min_def = std::min(min_def, def);
            if (def >= -2.0) ++ok;
            table_.rows.push_back({t, rhs, lz, def});
        }
        table_.set("min_deficit", min_def);
        table_.set("fraction_deficit_ge_-2", static_cast<double>(ok) / static_cast<double>(samples));
    }

    void prop2()
    {
        need("prop2", {"--support", "--max-weight", "--t"});
        std::string sup;
        for (auto p : p_.support) sup += (sup.empty() ? "" : ";") + std::to_string(p);
        table_.set("support", sup);
        table_.set("max_weight", std::to_string(p_.max_weight));
        table_.set("t", p_.t);
        if (given("--nodes")) table_.set("nodes", std::to_string(p_.nodes));
        auto support = p_.support;
        std::sort(support.begin(), support.end());
        table_.columns = {"n", "factorization", "main_term", "quadrature", "abs_error", "error_over_n"};
        double worst = 0.0;
        std::vector<int> alpha(support.size(), 0);
        auto emit = [&]() {
            std::vector<zl::FactoredInteger::Factor> fs;
            std::string name;
            for (std::size_t i = 0; i < support.size(); ++i)
                if (alpha[i] > 0) {
                    fs.push_back({support[i], alpha[i]});
                    name += (name.empty() ? "" : "*") + std::to_string(support[i]) + "^" + std::to_string(alpha[i]);
                }
            const zl::FactoredInteger n(fs);
            if (!n.value()) zl::detail::raise<zl::DomainError>("prop2: n overflows");
            const long long nodes = given("--nodes") ? p_.nodes : zl::cos_product_min_nodes(n, p_.t);
            const double main = zl::cos_product_main_term(n, p_.t);
            const double q = zl::cos_product_quadrature(n, p_.t, nodes);
            const double nv = static_cast<double>(*n.value());
            worst = std::max(worst, std::abs(q - main) / nv);
            table_.rows.push_back({static_cast<long long>(*n.value()), name.empty() ? std::string("1") : name, main, q,
                                   std::abs(q - main), std::abs(q - main) / nv});
        };
        // all exponent vectors with Σα <= max_weight, lexicographic
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
            if (i == support.size()) {
                emit();
                return;
            }
            for (int a = 0; a <= left; ++a) {
                alpha[i] = a;
                rec(i + 1, left - a);
            }
            alpha[i] = 0;
        };
        rec(0, p_.max_weight);
        table_.set("max_error_over_n", worst);
    }

    zl::ScheduleOverrides overrides() const
    {
        zl::ScheduleOverrides ov;
        if (given("--ratio")) ov.with_ratio(p_.ratio);
        if (given("--threshold")) ov.with_threshold(p_.threshold);
        if (given("--base")) ov.with_base(p_.base);
        return ov;
    }

    void split()
    {
        need("split", {"--k", "--T"});
        if (p_.k.size() != 1) throw UsageError{"split: give a single --k"};
        const long long samples = given("--samples") ? p_.samples : 10'000;
        const double k = p_.k[0];
        const auto sched = zl::beta_schedule(std::max(1.0, k), p_.T, overrides());
        table_.set("k", k);
        table_.set("T", p_.T);
        table_.set("samples", std::to_string(samples));
        table_.set("ratio", sched.ratio);
        table_.set("log_threshold", sched.log_threshold);
        table_.set("log_base", sched.log_base);
        table_.set("cap_index", std::to_string(sched.cap_index));
        table_.set("betas", join(sched.levels));
        const auto table = primes(zl::detail::power_bound(sched.log_bound(sched.cap_index)));
        const auto r = zl::empirical_split_moment(k, p_.T, sched, samples, table, p_.seed);
        table_.columns = {"class", "count", "measure_fraction", "contribution", "stderr", "surrogate", "surrogate_stderr"};
        for (const auto& c : r.classes) {
            const zl::Cell sur = c.surrogate ? zl::Cell(*c.surrogate) : zl::Cell(std::string());
            const zl::Cell sse = c.surrogate_stderr ? zl::Cell(*c.surrogate_stderr) : zl::Cell(std::string());
            table_.rows.push_back({c.label, c.count, c.measure_fraction, c.contribution, c.stderr_, sur, sse});
        }
        table_.set("total", r.total);
        table_.set("total_stderr", r.total_stderr);
        table_.set("unsplit", r.unsplit);
        table_.set("unsplit_stderr", r.unsplit_stderr);
        table_.set("consistent", std::string(r.consistent ? "true" : "false"));
    }

    void random_model()
    {
        need("random-model", {"--k", "--x"});
        const long long samples = given("--samples") ? p_.samples : 100'000;
        table_.set("k", join(p_.k));
        table_.set("x", p_.x);
        table_.set("scheme", p_.scheme);
        table_.set("samples", std::to_string(samples));
        const auto table = primes(p_.x);
        table_.columns = {"k", "x", "scheme", "samples", "monte_carlo", "stderr", "exact_product", "gaussian", "variance"};
        for (double k : p_.k) {
            zl::ModelConfig cfg;
            cfg.x = p_.x;
            cfg.k = k;
            cfg.weight_scheme = p_.scheme == "plain" ? zl::WeightScheme::plain : zl::WeightScheme::prop1;
            cfg.n_samples = samples;
            cfg.seed = p_.seed;
            const auto r = zl::mgf_monte_carlo(cfg, table);
            table_.rows.push_back({k, p_.x, p_.scheme, samples, r.monte_carlo, r.stderr_, r.exact_product, r.gaussian,
                                   r.variance});
        }
    }

    void constants()
    {
        need("constants", {"--k"});
        table_.set("k", join(p_.k));
        table_.set("prime_limit", std::to_string(p_.prime_limit));
        table_.set("m_terms", std::to_string(p_.m_terms));
        table_.set("N", std::to_string(p_.N));
        const auto table = primes(static_cast<double>(p_.prime_limit));
        table_.columns = {"k", "a", "a_tail", "f_truncated", "f_extrapolated", "a_times_f"};
        for (double k : p_.k) {
            const auto a = zl::a_constant(k, table, p_.prime_limit, p_.m_terms);
            const auto f = zl::f_rmt(k, p_.N);
            table_.rows.push_back({k, a.value, a.tail, f.truncated, f.extrapolated, a.value * f.extrapolated});
        }
    }

    void quadratic()
    {
        need("quadratic", {"--k", "--X"});
        table_.set("k", join(p_.k));
        table_.set("X", p_.X);
        table_.set("tol", p_.tol);
        std::optional<zl::LValueCache> cache;
        if (!p_.no_cache)
            cache.emplace(p_.l_cache.empty() ? zl::cache_directory() / "lvalues.csv" : std::filesystem::path(p_.l_cache));
        table_.columns = {"k",   "X",       "count",   "count_pos",  "count_neg", "sum",
                          "sum_pos", "sum_neg", "normalizer", "ratio",     "ratio_pos", "ratio_neg"};
        for (double k : p_.k) {
            const auto r = zl::theorem2_empirical(k, p_.X, cache ? &*cache : nullptr, p_.tol);
            table_.rows.push_back({k, p_.X, r.count, r.count_pos, r.count_neg, r.sum, r.sum_pos, r.sum_neg, r.normalizer,
                                   r.ratio, r.ratio_pos, r.ratio_neg});
        }
    }

    CLI::App& app_;
    const Params& p_;
    zl::Table table_;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"zetalab: numerical experiments on moments of the zeta function"};
    app.set_config("--config", "", "key=value config file; command-line flags win");
    app.require_subcommand(1);
    Params p;

    app.add_option("--k", p.k, "moment exponent(s), comma separated")->delimiter(',');
    app.add_option("--t0", p.t0, "lower height");
    app.add_option("--t1", p.t1, "upper height");
    app.add_option("--nodes-per-unit", p.nodes_per_unit, "quadrature node density");
    app.add_option("--T", p.T, "height T (interval [T, 2T])");
    app.add_option("--x", p.x, "polynomial length / prime cutoff");
    app.add_option("--x-exponent", p.x_exponent, "polynomial length as a power of T");
    app.add_option("--samples", p.samples, "Monte Carlo sample count");
    app.add_option("--seed", p.seed, "random seed");
    app.add_option("--support", p.support, "primes for the prop2 sweep, comma separated")->delimiter(',');
    app.add_option("--max-weight", p.max_weight, "largest Σα in the prop2 sweep");
    app.add_option("--t", p.t, "height T for prop2");
    app.add_option("--nodes", p.nodes, "prop2 quadrature nodes (default: smallest accepted)");
    app.add_option("--ratio", p.ratio, "schedule ratio override");
    app.add_option("--threshold", p.threshold, "schedule threshold override");
    app.add_option("--base", p.base, "schedule base override");
    app.add_option("--scheme", p.scheme, "weight scheme")->check(CLI::IsMember({"plain", "prop1"}));
    app.add_option("--prime-limit", p.prime_limit, "prime cutoff for a(k)");
    app.add_option("--m-terms", p.m_terms, "minimum inner-series terms for a(k)");
    app.add_option("--N", p.N, "truncation N for f(k)");
    app.add_option("--X", p.X, "discriminant range [X, 2X]");
    app.add_option("--tol", p.tol, "L-value tolerance");
    app.add_option("--l-cache", p.l_cache, "L-value cache file");
    app.add_flag("--no-cache", p.no_cache, "disable prime and L-value caches");
    app.add_option("--format", p.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", p.out, "output file (default stdout)");

    for (const char* name : {"moment", "prop1", "prop2", "split", "random-model", "constants", "quadratic"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        Runner runner(app, p);
        const auto table = runner.run(cmd);
        const auto text = zl::render(table, p.format == "json" ? zl::Format::json : zl::Format::csv);
        if (p.out.empty()) {
            std::fwrite(text.data(), 1, text.size(), stdout);
            if (std::fflush(stdout) != 0) zl::detail::raise<zl::IoError>("failed writing stdout");
        } else {
            zl::write_text(p.out, text);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what << "\n" << app.help();
        return 2;
    } catch (const zl::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const zl::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const zl::CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return 3;
    } catch (const zl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const zl::InsufficientTableError& e) {
        std::cerr << "table error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
