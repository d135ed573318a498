// neqcp: nonequilibrium Casimir-Polder force between a nanoparticle and
// graphene. Subcommands force, sweep, ratio, zero-cross, verify.
//
// Exit codes: 0 ok, 1 other failure (including an inconsistent verify),
// 2 bracket error, 3 quadrature budget exhausted, 4 bad configuration.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "neqcp/sweep.hpp"

using namespace neqcp;

namespace {

enum Exit { kOk = 0, kFailure = 1, kBracket = 2, kBudget = 3, kConfig = 4 };

struct Common {
    std::optional<std::string> config, out, cache_dir;
    std::vector<std::pair<std::string, std::string>> overrides;
    int jobs = 1;
    bool verify = false;
};

// Flags that map one-to-one onto config keys. Applied after --config so
// they win.
void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "key = value configuration file");
    app->add_option("--out", c.out, "write CSV here instead of stdout");
    app->add_option("--jobs", c.jobs, "grid points computed concurrently")->check(CLI::PositiveNumber);
    app->add_option("--cache-dir", c.cache_dir, "result cache directory (else $NEQCP_CACHE_DIR)");
    app->add_flag("--verify", c.verify, "run the representation cross-check");
    for (auto [flag, key, help] : std::vector<std::tuple<std::string, std::string, std::string>>{
             {"--tol", "force_rel_tol", "force relative tolerance"},
             {"--tensor-tol", "tensor_rel_tol", "polarization tensor relative tolerance"},
             {"--vf", "vF", "Fermi velocity override, m/s"},
             {"--tg", "T_g", "graphene temperature(s), K, comma separated"},
             {"--te", "T_E", "environment temperature, K"},
             {"--radius", "radius", "nanoparticle radius, m"},
             {"--material", "material", "metal | dielectric:EPS"},
             {"--amin", "a_min", "smallest separation, m"},
             {"--amax", "a_max", "largest separation, m"},
             {"--points", "points", "grid points"},
             {"--spacing", "spacing", "linear | log"}}) {
        app->add_option_function<std::string>(
            flag, [&c, key](const std::string& v) { c.overrides.emplace_back(key, v); }, help);
    }
}

RunConfig build_config(const Common& c, RunConfig base = {}) {
    if (c.config) apply_config_file(base, *c.config);
    for (const auto& [k, v] : c.overrides) apply_config_value(base, k, v);
    if (c.verify) base.verify = true;
    base.validate();
    return base;
}

void emit(const Common& c, const std::string& csv) {
    if (!c.out) {
        std::cout << csv;
        return;
    }
    std::ofstream out(*c.out, std::ios::binary | std::ios::trunc);
    out << csv;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + *c.out);
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

int run_sweep_cmd(const Common& c, RunConfig cfg) {
    const auto cache = ResultCache::from_environment(c.cache_dir);
    bool computed = true;
    const std::string csv = cached_sweep_csv(cfg, cache, c.jobs, &computed, warn);
    if (!computed) std::cerr << "cache hit " << cache.path_for(cfg).string() << '\n';
    emit(c, csv);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Casimir-Polder force between a nanoparticle and graphene, in and out of "
                 "thermal equilibrium. Attraction is negative, repulsion positive."};
    app.require_subcommand(1);

    Common c;
    double a_point = 0.8e-6;
    auto* force = app.add_subcommand("force", "force at a single separation");
    add_common(force, c);
    force->add_option("-a,--separation", a_point, "separation, m");

    auto* sweep = app.add_subcommand("sweep", "force over a separation grid");
    add_common(sweep, c);

    auto* ratio = app.add_subcommand("ratio", "F_neq / F_eq for T_g = 77, 500, 700 K");
    add_common(ratio, c);

    double lo = 0.3e-6, hi = 2e-6;
    auto* zero = app.add_subcommand("zero-cross",
                                    "separation where F_neq changes sign (positive = repulsion)");
    add_common(zero, c);
    zero->add_option("--lo", lo, "lower bracket end, m");
    zero->add_option("--hi", hi, "upper bracket end, m");

    auto* verify = app.add_subcommand("verify", "compare the two representations of F_neq");
    add_common(verify, c);
    verify->add_option("-a,--separation", a_point, "separation, m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (force->parsed()) {
            const RunConfig cfg = build_config(c);
            Table t;
            t.metadata = metadata_for(cfg);
            t.metadata.push_back(fmt::format("single point a={:g} m", a_point));
            t.rows = compute_point(cfg, a_point);
            std::ostringstream ss;
            emit_csv(t, ss);
            emit(c, ss.str());
            return kOk;
        }
        if (sweep->parsed()) return run_sweep_cmd(c, build_config(c));
        if (ratio->parsed()) {
            RunConfig base;
            base.T_g = {77.0, 500.0, 700.0};
            return run_sweep_cmd(c, build_config(c, base));
        }
        if (zero->parsed()) {
            const RunConfig cfg = build_config(c);
            const ZeroCrossing z = find_zero_crossing(cfg, lo, hi);
            std::cout << fmt::format(
                "# F_neq changes sign at a = {:.6e} m (bracket [{:.6e}, {:.6e}] m, residual "
                "band {:.3e} N, {} bisections, T_E = {:g} K, T_g = {:g} K)\n"
                "# attraction is negative, repulsion positive\n"
                "a_m,a_lo_m,a_hi_m,residual_N\n{:.8e},{:.8e},{:.8e},{:.8e}\n",
                z.a, z.a_lo, z.a_hi, z.residual, z.iterations, cfg.T_E, cfg.T_g.front(), z.a,
                z.a_lo, z.a_hi, z.residual);
            return kOk;
        }
        if (verify->parsed()) {
            const RunConfig cfg = build_config(c);
            bool all = true;
            for (double tg : cfg.T_g) {
                const auto rep = cross_check_representation(a_point, cfg.T_E, tg, cfg.spec,
                                                             cfg.force_options(), cfg.constants);
                std::cout << fmt::format("a = {:g} m, T_E = {:g} K, T_g = {:g} K: {}\n", a_point,
                                         cfg.T_E, tg, rep.summary());
                all = all && rep.pass();
            }
            return all ? kOk : kFailure;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const BracketError& e) {
        std::cerr << "bracket error: " << e.what() << '\n';
        return kBracket;
    } catch (const SweepError& e) {
        std::cerr << "sweep aborted: " << e.what() << '\n';
        return e.budget ? kBudget : kFailure;
    } catch (const quad::BudgetExceeded& e) {
        std::cerr << "quadrature budget exhausted: " << e.what() << '\n';
        return kBudget;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
