#include "neqcp/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <fmt/format.h>

namespace neqcp {

namespace {

constexpr const char* kHeader = "a_m,T_g_K,F_neq_N,F_eq_N,ratio,f_tilde_N,delta_N,err_N";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

NanoparticleSpec parse_material(double radius, const std::string& text) {
    const std::string t = trim(text);
    if (t == "metal") return NanoparticleSpec::metal(radius);
    const std::string prefix = "dielectric:";
    if (t.rfind(prefix, 0) == 0)
        return NanoparticleSpec::dielectric(radius, parse_double("material", t.substr(prefix.size())));
    throw ConfigError(fmt::format("material: expected metal or dielectric:EPS, got '{}'", text));
}

std::string material_text(const NanoparticleSpec& s) {
    return s.material == Material::Metal ? "metal"
                                         : fmt::format("dielectric:{:.17g}", s.epsilon_static);
}

std::string num(double v) { return fmt::format("{:.8e}", v); }

}  // namespace

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (!(spec.radius > 0)) fail("radius must be positive");
    if (spec.material == Material::Dielectric && !(spec.epsilon_static > 1))
        fail("dielectric permittivity must exceed 1");
    if (!(T_E > 0)) fail("T_E must be positive");
    if (T_g.empty()) fail("T_g list is empty");
    for (double t : T_g)
        if (!(t >= 0)) fail("T_g values must be nonnegative");
    if (!(a_min > 0) || !(a_min < a_max)) fail("need 0 < a_min < a_max");
    if (points < 2) fail("grid needs at least 2 points");
    for (double tol : {force_rel_tol, tensor_rel_tol})
        if (!(tol > 0 && tol <= 1e-2)) fail("tolerances must lie in (0, 1e-2]");
    if (!(constants.vF > 0 && constants.vF < constants.c)) fail("vF must lie in (0, c)");
    for (double t : T_g) {
        try {
            omega_cutoff(T_E, t, constants);
        } catch (const DomainError& e) {
            fail(e.what());
        }
    }
}

ForceOptions RunConfig::force_options() const {
    ForceOptions o;
    o.rel_tol = force_rel_tol;
    o.tensor_rel_tol = tensor_rel_tol;
    return o;
}

std::vector<double> RunConfig::grid() const {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        const double t = double(i) / (points - 1);
        g[i] = spacing == Spacing::Linear ? a_min + t * (a_max - a_min)
                                          : a_min * std::pow(a_max / a_min, t);
    }
    g.front() = a_min;
    g.back() = a_max;
    return g;
}

std::string RunConfig::canonical() const {
    std::string tg;
    for (double t : T_g) tg += fmt::format("{:.17g};", t);
    return fmt::format(
        "version={} radius={:.17g} material={} T_E={:.17g} T_g={} a_min={:.17g} "
        "a_max={:.17g} points={} spacing={} force_rel_tol={:.17g} tensor_rel_tol={:.17g} "
        "verify={} emit_ratio={} {}",
        kVersion, spec.radius, material_text(spec), T_E, tg, a_min, a_max, points,
        spacing == Spacing::Linear ? "linear" : "log", force_rel_tol, tensor_rel_tol, verify,
        emit_ratio, constants.describe());
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) { return fmt::format("{:016x}", h); }

void apply_config_value(RunConfig& cfg, const std::string& key_in, const std::string& value) {
    std::string key = trim(key_in);
    for (auto& ch : key)
        if (ch == '-') ch = '_';
    if (key == "radius") {
        cfg.spec.radius = parse_double(key, value);
    } else if (key == "material") {
        cfg.spec = parse_material(cfg.spec.radius, value);
    } else if (key == "T_E" || key == "te") {
        cfg.T_E = parse_double(key, value);
    } else if (key == "T_g" || key == "tg") {
        cfg.T_g = parse_list(key, value);
    } else if (key == "a_min" || key == "amin") {
        cfg.a_min = parse_double(key, value);
    } else if (key == "a_max" || key == "amax") {
        cfg.a_max = parse_double(key, value);
    } else if (key == "points") {
        const double p = parse_double(key, value);
        if (p != std::floor(p) || p > 1e6) throw ConfigError("points must be an integer");
        cfg.points = int(p);
    } else if (key == "spacing") {
        const std::string v = trim(value);
        if (v == "linear")
            cfg.spacing = Spacing::Linear;
        else if (v == "log" || v == "logarithmic")
            cfg.spacing = Spacing::Logarithmic;
        else
            throw ConfigError("spacing must be linear or log");
    } else if (key == "force_rel_tol" || key == "tol") {
        cfg.force_rel_tol = parse_double(key, value);
    } else if (key == "tensor_rel_tol") {
        cfg.tensor_rel_tol = parse_double(key, value);
    } else if (key == "verify") {
        cfg.verify = parse_bool(key, value);
    } else if (key == "emit_ratio") {
        cfg.emit_ratio = parse_bool(key, value);
    } else if (key == "vF" || key == "vf") {
        const double vf = parse_double(key, value);
        if (!(vf > 0 && vf < cfg.constants.c)) throw ConfigError("vF must lie in (0, c)");
        cfg.constants.vF = vf;
    } else {
        throw ConfigError(fmt::format("unknown key '{}'", key_in));
    }
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
    std::stringstream ss(text);
    std::string line;
    for (int n = 1; std::getline(ss, line); ++n) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("{}:{}: expected key = value", origin, n));
        try {
            apply_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}:{}: {}", origin, n, e.what()));
        }
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str(), path.string());
}

// ---------------------------------------------------------------------------

std::vector<Row> compute_point(const RunConfig& cfg, double a) {
    const ForceOptions opt = cfg.force_options();
    const PhysicalConstants& pc = cfg.constants;
    std::optional<ForceResult> eq;
    if (cfg.emit_ratio) eq = equilibrium_force(a, cfg.T_E, cfg.spec, opt, pc);

    std::vector<Row> rows;
    for (double tg : cfg.T_g) {
        Row r;
        r.a = a;
        r.T_g = tg;
        NoneqResult n;
        if (eq && tg == cfg.T_E) {
            // same Matsubara sum, already done
            n.total = *eq;
            n.breakdown.f_tilde_TE_Tg = eq->force;
        } else {
            n = noneq_force(a, cfg.T_E, tg, cfg.spec, opt, pc);
        }
        r.F_neq = n.total.force;
        r.f_tilde = n.breakdown.f_tilde_TE_Tg;
        r.delta = n.breakdown.delta_evanescent;
        r.err = n.total.error;
        r.F_eq = eq ? eq->force : NAN;
        r.ratio = eq ? r.F_neq / r.F_eq : NAN;
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::string> metadata_for(const RunConfig& cfg) {
    std::string tg;
    for (std::size_t i = 0; i < cfg.T_g.size(); ++i)
        tg += fmt::format("{}{:g}", i ? "," : "", cfg.T_g[i]);
    const double alpha0 = polarizability(cfg.spec);
    return {
        fmt::format("neqcp {}", kVersion),
        fmt::format("config_hash {}", hex64(cfg.hash())),
        fmt::format("constants {}", cfg.constants.describe()),
        fmt::format("tolerances force_rel_tol={:g} tensor_rel_tol={:g}", cfg.force_rel_tol,
                    cfg.tensor_rel_tol),
        fmt::format("particle {} R={:g} m alpha0={:.9e} m^3", material_text(cfg.spec),
                    cfg.spec.radius, alpha0),
        fmt::format("temperatures T_E={:g} K T_g={} K", cfg.T_E, tg),
        fmt::format("grid {} points={} a_min={:g} m a_max={:g} m",
                    cfg.spacing == Spacing::Linear ? "linear" : "log", cfg.points, cfg.a_min,
                    cfg.a_max),
        "sign negative force = attraction, positive = repulsion",
        cfg.emit_ratio ? "ratio F_neq / F_eq(a, T_E)" : "ratio not computed (emit_ratio = false)",
    };
}

Table run_sweep(const RunConfig& cfg, int jobs, const PointFn& fn) {
    cfg.validate();
    const std::vector<double> grid = cfg.grid();
    const std::size_t n = grid.size();
    std::vector<std::vector<Row>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t i; !failed && (i = next++) < n;) {
            try {
                results[i] = fn(cfg, grid[i]);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    const int nt = std::max(1, std::min<int>(jobs, int(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) continue;
        const std::size_t row = i * cfg.T_g.size();
        try {
            std::rethrow_exception(errors[i]);
        } catch (const quad::BudgetExceeded& e) {
            throw SweepError(fmt::format("row {} (a = {:g} m): {}", row, grid[i], e.what()), row,
                             grid[i], true);
        } catch (const std::exception& e) {
            throw SweepError(fmt::format("row {} (a = {:g} m): {}", row, grid[i], e.what()), row,
                             grid[i], false);
        }
    }

    Table t;
    t.metadata = metadata_for(cfg);
    for (auto& r : results) t.rows.insert(t.rows.end(), r.begin(), r.end());

    if (cfg.verify) {
        for (const Row& r : t.rows) {
            if (!(r.T_g > 0)) {
                t.metadata.push_back(fmt::format("verify a={:.8e} T_g={:g} skipped (T_g = 0)", r.a, r.T_g));
                continue;
            }
            const auto rep = cross_check_representation(r.a, cfg.T_E, r.T_g, cfg.spec,
                                                        cfg.force_options(), cfg.constants);
            t.metadata.push_back(fmt::format(
                "verify a={:.8e} T_g={:g} assembly_rel={:.2e} half_diff_rel={:.2e} {}", r.a,
                r.T_g, rep.assembly_rel, rep.half_diff_rel, rep.pass() ? "ok" : "INCONSISTENT"));
        }
    }
    return t;
}

void emit_csv(const Table& t, std::ostream& out) {
    if (t.rows.empty()) throw std::invalid_argument("emit_csv: empty table");
    for (const auto& m : t.metadata) out << "# " << m << '\n';
    out << kHeader << '\n';
    for (const Row& r : t.rows)
        out << num(r.a) << ',' << fmt::format("{:g}", r.T_g) << ',' << num(r.F_neq) << ','
            << num(r.F_eq) << ',' << num(r.ratio) << ',' << num(r.f_tilde) << ','
            << num(r.delta) << ',' << num(r.err) << '\n';
}

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += fmt::format(".tmp{}", ::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
        out << bytes;
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("write failed for {}", tmp.string()));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    }
}

}  // namespace

void write_csv(const Table& t, const std::filesystem::path& path) {
    std::ostringstream ss;
    emit_csv(t, ss);
    write_atomic(path, ss.str());
}

Table parse_csv(std::istream& in) {
    Table t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.metadata.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        if (!header) {
            if (line != kHeader) throw std::runtime_error("parse_csv: unexpected header: " + line);
            header = true;
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            v.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str() || *end != '\0')
                throw std::runtime_error("parse_csv: bad number '" + cell + "'");
        }
        if (v.size() != 8) throw std::runtime_error("parse_csv: wrong column count: " + line);
        t.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    if (!header) throw std::runtime_error("parse_csv: no header row");
    return t;
}

// ---------------------------------------------------------------------------

ZeroCrossing find_zero_crossing(const std::function<ForceSample(double)>& f, double a_lo,
                                double a_hi) {
    if (!(a_lo > 0) || !(a_lo < a_hi))
        throw BracketError("bracket must satisfy 0 < a_lo < a_hi", a_lo, NAN, a_hi, NAN);
    ForceSample lo = f(a_lo), hi = f(a_hi);
    if (!(lo.force * hi.force < 0)) {
        if (lo.force == 0) return {a_lo, a_lo, a_lo, lo.error, 0};
        if (hi.force == 0) return {a_hi, a_hi, a_hi, hi.error, 0};
        throw BracketError(
            fmt::format("no sign change: F({:g} m) = {:.6e} N, F({:g} m) = {:.6e} N", a_lo,
                        lo.force, a_hi, hi.force),
            a_lo, lo.force, a_hi, hi.force);
    }
    int it = 0;
    for (; it < 200; ++it) {
        const double mid = 0.5 * (a_lo + a_hi);
        const double slope = std::abs(hi.force - lo.force) / (a_hi - a_lo);
        const double noise = slope > 0 ? (lo.error + hi.error) / slope : INFINITY;
        if (a_hi - a_lo < std::max(1e-3 * mid, noise)) break;
        const ForceSample m = f(mid);
        if (m.force == 0) {
            a_lo = a_hi = mid;
            break;
        }
        if ((m.force < 0) == (lo.force < 0)) {
            a_lo = mid;
            lo = m;
        } else {
            a_hi = mid;
            hi = m;
        }
        // the sign itself is within the noise: nothing more to learn
        if (std::abs(m.force) <= m.error) break;
    }
    const double mid = 0.5 * (a_lo + a_hi);
    const ForceSample m = f(mid);
    return {mid, a_lo, a_hi, std::abs(m.force) + m.error, it};
}

ZeroCrossing find_zero_crossing(const RunConfig& cfg, double a_lo, double a_hi) {
    cfg.validate();
    const ForceOptions opt = cfg.force_options();
    const double tg = cfg.T_g.front();
    return find_zero_crossing(
        [&](double a) {
            const auto r = noneq_force(a, cfg.T_E, tg, cfg.spec, opt, cfg.constants);
            return ForceSample{r.total.force, r.total.error};
        },
        a_lo, a_hi);
}

// ---------------------------------------------------------------------------

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

ResultCache ResultCache::from_environment(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return ResultCache(*flag);
    if (const char* env = std::getenv("NEQCP_CACHE_DIR"); env && *env) return ResultCache(env);
    return ResultCache({});
}

std::filesystem::path ResultCache::path_for(const RunConfig& cfg) const {
    return dir_ / fmt::format("neqcp-{}.csv", hex64(cfg.hash()));
}

std::optional<std::string> ResultCache::lookup(
    const RunConfig& cfg, const std::function<void(const std::string&)>& warn) const {
    if (!enabled()) return std::nullopt;
    const auto path = path_for(cfg);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    auto reject = [&](const std::string& why) -> std::optional<std::string> {
        if (warn) warn(fmt::format("ignoring cache entry {}: {}", path.string(), why));
        return std::nullopt;
    };
    try {
        std::istringstream is(bytes);
        const Table t = parse_csv(is);
        if (t.metadata.size() < 2 || t.metadata[0] != fmt::format("neqcp {}", kVersion))
            return reject("written by another version");
        if (t.metadata[1] != fmt::format("config_hash {}", hex64(cfg.hash())))
            return reject("config hash mismatch");
        if (t.rows.size() != cfg.grid().size() * cfg.T_g.size() || bytes.back() != '\n')
            return reject("truncated");
    } catch (const std::exception& e) {
        return reject(e.what());
    }
    return bytes;
}

void ResultCache::store(const RunConfig& cfg, const std::string& csv) const {
    if (!enabled()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create cache directory {}", dir_.string()));
    write_atomic(path_for(cfg), csv);
}

std::string cached_sweep_csv(const RunConfig& cfg, const ResultCache& cache, int jobs,
                             bool* computed, const std::function<void(const std::string&)>& warn,
                             const PointFn& fn) {
    cfg.validate();
    if (auto hit = cache.lookup(cfg, warn)) {
        if (computed) *computed = false;
        return *hit;
    }
    std::ostringstream ss;
    emit_csv(run_sweep(cfg, jobs, fn), ss);
    const std::string csv = ss.str();
    cache.store(cfg, csv);
    if (computed) *computed = true;
    return csv;
}

}  // namespace neqcp
