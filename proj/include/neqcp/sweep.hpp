#pragma once

// Separation sweeps, zero-crossing search, CSV emission and the on-disk
// result cache behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "neqcp/nonequilibrium.hpp"

namespace neqcp {

inline constexpr const char* kVersion = "0.1.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Spacing { Linear, Logarithmic };

struct RunConfig {
    NanoparticleSpec spec = NanoparticleSpec::metal(2.5e-9);
    double T_E = 300.0;
    std::vector<double> T_g = {77.0};
    double a_min = 0.2e-6;
    double a_max = 2e-6;
    int points = 60;
    Spacing spacing = Spacing::Logarithmic;
    double force_rel_tol = quad::kForceRelTol;
    double tensor_rel_tol = quad::kTensorRelTol;
    bool verify = false;
    bool emit_ratio = true;
    PhysicalConstants constants{};

    /// Throws ConfigError.
    void validate() const;
    ForceOptions force_options() const;
    std::vector<double> grid() const;
    /// Canonical text of every physics-relevant field plus the constants and
    /// the version tag; the cache key is its hash.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Applies `key = value` lines ('#' starts a comment) on top of `cfg`.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "");
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// One key at a time, as the CLI flags do.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t h);

struct Row {
    double a = 0;
    double T_g = 0;
    double F_neq = 0;
    double F_eq = 0;
    double ratio = 0;
    double f_tilde = 0;
    double delta = 0;
    double err = 0;
};

struct Table {
    std::vector<std::string> metadata;  // without the leading '#'
    std::vector<Row> rows;
};

/// Physics for one separation: one row per T_g, in config order.
using PointFn = std::function<std::vector<Row>(const RunConfig&, double a)>;
std::vector<Row> compute_point(const RunConfig& cfg, double a);

/// A physics error at one grid point.
class SweepError : public std::runtime_error {
public:
    SweepError(const std::string& what, std::size_t row, double a, bool budget)
        : std::runtime_error(what), row(row), a(a), budget(budget) {}
    std::size_t row;
    double a;
    bool budget;  // quadrature budget exhausted rather than a domain error
};

Table run_sweep(const RunConfig& cfg, int jobs = 1, const PointFn& fn = compute_point);
std::vector<std::string> metadata_for(const RunConfig& cfg);

void emit_csv(const Table& t, std::ostream& out);
/// Write-temp-then-rename; errors name the path.
void write_csv(const Table& t, const std::filesystem::path& path);
Table parse_csv(std::istream& in);

// ---------------------------------------------------------------------------

class BracketError : public std::runtime_error {
public:
    BracketError(const std::string& what, double a_lo, double f_lo, double a_hi, double f_hi)
        : std::runtime_error(what), a_lo(a_lo), f_lo(f_lo), a_hi(a_hi), f_hi(f_hi) {}
    double a_lo, f_lo, a_hi, f_hi;
};

struct ForceSample {
    double force;
    double error;
};

struct ZeroCrossing {
    double a;         // midpoint of the final bracket
    double a_lo, a_hi;
    double residual;  // |F| band at the midpoint, N
    int iterations;
};

/// Bisection on sign(F). Stops once the bracket is narrower than
/// max(1e-3 a, the width over which F is within its own error band).
ZeroCrossing find_zero_crossing(const std::function<ForceSample(double)>& f, double a_lo,
                                double a_hi);
/// F_neq(a) at the config's first T_g.
ZeroCrossing find_zero_crossing(const RunConfig& cfg, double a_lo, double a_hi);

// ---------------------------------------------------------------------------

class ResultCache {
public:
    /// Empty path disables the cache.
    explicit ResultCache(std::filesystem::path dir);
    /// --cache-dir wins over NEQCP_CACHE_DIR.
    static ResultCache from_environment(const std::optional<std::string>& flag);

    bool enabled() const { return !dir_.empty(); }
    /// Raw CSV bytes on a valid hit; corrupt or stale entries are reported
    /// through `warn` and treated as misses.
    std::optional<std::string> lookup(const RunConfig& cfg,
                                      const std::function<void(const std::string&)>& warn) const;
    void store(const RunConfig& cfg, const std::string& csv) const;
    std::filesystem::path path_for(const RunConfig& cfg) const;

private:
    std::filesystem::path dir_;
};

/// Sweep through the cache: replays a hit byte for byte, otherwise computes
/// and stores. `computed` reports which happened.
std::string cached_sweep_csv(const RunConfig& cfg, const ResultCache& cache, int jobs,
                             bool* computed = nullptr,
                             const std::function<void(const std::string&)>& warn = {},
                             const PointFn& fn = compute_point);

}  // namespace neqcp
