#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atsp/beta.hpp"
#include "atsp/curve_builder.hpp"
#include "atsp/nets.hpp"
#include "atsp/snowflake.hpp"
#include "json.hpp"

namespace atsp {

// One pass/fail row of a report. `rule` says in words what was compared.
struct Check {
    std::string name;
    bool pass = true;
    double value = 0.0;
    double threshold = 0.0;
    std::string rule;
};
void to_json(nlohmann::json& j, const Check& c);
bool all_pass(const std::vector<Check>& checks);

// A CSV table with a versioned column schema, written as a leading
// "# schema: <name>/v<version>" line, then the header.
struct CsvTable {
    std::string name;
    int version = 1;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string str() const;
};

// Shortest decimal that round-trips ("%.17g" trimmed), so output is byte-stable.
std::string fmt(double x);
std::string fmt(long long x);

// SHA-1 of "blob <len>\0<body>", hex: the id git gives a file with this content.
std::string git_blob_sha1(const std::string& body);
// Hash of config.dump() (keys sorted, compact).
std::string config_hash(const nlohmann::json& config);

// A generated curve: schedule plus construction mode.
struct CurveSpec {
    std::string name;
    HeightSchedule schedule;
    SnowflakeMode mode = SnowflakeMode::Planar;
    double p = 2.0;
};
// "segment" (eta = 0) or any HeightSchedule::parse name. mode "" picks planar
// for segment/prop2/prop4/const at p = 2, lp otherwise.
CurveSpec parse_curve(const std::string& name, const std::string& mode, double p);
SnowflakeMode parse_mode(const std::string& mode);
std::string mode_name(SnowflakeMode m);

// ---------------------------------------------------------------- sharpness

enum class Proposition { Prop2, Prop4, Prop3, Prop1 };
Proposition parse_proposition(const std::string& s);
std::string proposition_name(Proposition p);

// Trend criteria; finite data cannot show divergence, so these are the rules.
struct TrendRules {
    double decay_ratio_max = 0.9;  // geometric mean ratio of level increments
    int decay_from = 4;            // first level of the decay window
    double growth_multiple = 5.0;  // lower-bound partial sum at growth_top over growth_base
    int growth_base = 5;
    int growth_top = 20;
};

struct SharpnessConfig {
    Proposition prop = Proposition::Prop4;
    double p = 5.0;  // prop3/prop1 only; prop2/prop4 are planar
    double eps = 0.5;
    int n_min = 3;
    int n = 6;              // finest generation fed to the optimizer
    double A = 2.0;         // window constant of the optimizer sums
    double A_lower = 16.0;  // window constant of the lower-bound series
    int margin = 4;         // cutoff: windows >= 2^margin r_n
    std::uint64_t seed = 0;  // net seed point
    TrendRules rules;
};
nlohmann::json to_json(const SharpnessConfig& c);

struct SharpnessGeneration {
    int n = 0;
    std::size_t points = 0;
    int k_cutoff = 0;
    double length = 0.0;  // Lip(gamma_n)
    double length_lower = 0.0;
    double length_upper = 0.0;
    std::vector<double> exponents;  // crit - eps, crit, crit + eps
    std::vector<double> S;          // partial Jones sums at those exponents, levels 0..k_cutoff
};

struct LowerBoundTerm {
    int k = 0;
    int m = 0;
    double radius = 0.0;  // A 2^-k
    double r_m = 0.0;
    double eta_m = 0.0;
    double lower = 0.0;  // (r_m / radius) c eta_m <= beta(k)
    double term = 0.0;   // lower^exponent
    double partial = 0.0;
    bool scale_ok = true;  // 2 r_m <= radius, so B(v, r_m) sits inside the window
};

struct SharpnessReport {
    SharpnessConfig config;
    CurveSpec curve;
    double crit = 2.0;
    std::vector<SharpnessGeneration> generations;
    // Per-level increments at crit + eps on the finest generation.
    double increment_exponent = 0.0;
    std::vector<LevelSum> increments;
    double decay_ratio = 0.0;
    int decay_levels = 0;
    // Lower-bound series at crit - eps (prop4, prop1) or crit (prop2, prop3).
    double lower_exponent = 0.0;
    double lower_constant = 0.0;  // sqrt(3)/4 planar, 1/4 in l_p
    int k1 = 0;
    std::vector<LowerBoundTerm> lower_series;
    double growth_ratio = 0.0;
    std::vector<Check> checks;
    bool pass = true;
};

SharpnessReport run_sharpness(const SharpnessConfig& config);
nlohmann::json to_json(const SharpnessReport& r);
std::vector<CsvTable> tables(const SharpnessReport& r);

// ------------------------------------------------------------------- pq gap

struct PqGapConfig {
    double p = 1.5;
    std::vector<double> q{2.0};
    int n = 10;
    int edge_check_max = 6;  // generation used for the edge-wise norm comparison
    double p_growth_min = 1.5;
};
nlohmann::json to_json(const PqGapConfig& c);

struct PqRow {
    int n = 0;
    double p_length = 0.0;
    std::vector<double> q_length;
    std::vector<double> q_bound;  // exp(C_q sum ...), only meaningful for q > p
};

struct PqGapReport {
    PqGapConfig config;
    HeightSchedule schedule;
    std::vector<PqRow> rows;
    double p_growth = 0.0;  // last / first p-length
    std::size_t edges_checked = 0;
    double edge_worst = 0.0;  // max |e|_q / |e|_p over edges and q >= p
    std::vector<Check> checks;
    bool pass = true;
};

PqGapReport run_pq_gap(const PqGapConfig& config);
nlohmann::json to_json(const PqGapReport& r);
CsvTable table(const PqGapReport& r);

// ---------------------------------------------------------- necessary check

struct NecessaryConfig {
    std::string curve = "prop4";
    std::string mode;
    double p = 2.0;
    double A = 4.0;
    int n_min = 3;
    int n_max = 8;
    int margin = 4;
    double band = 4.0;  // allowed max/min ratio across generations
    std::uint64_t seed = 0;
};
nlohmann::json to_json(const NecessaryConfig& c);

struct NecessaryRow {
    int n = 0;
    std::size_t points = 0;
    int k_cutoff = 0;
    double length = 0.0;
    double S = 0.0;  // diam + partial sum at exponent max(2, p)
    double ratio = 0.0;
};

struct NecessaryReport {
    NecessaryConfig config;
    CurveSpec curve;
    double exponent = 2.0;
    std::vector<NecessaryRow> rows;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    std::vector<Check> checks;
    bool pass = true;
};

NecessaryReport run_necessary_check(const NecessaryConfig& config);
nlohmann::json to_json(const NecessaryReport& r);
CsvTable table(const NecessaryReport& r);

// ---------------------------------------------------------------------- SVG

struct SvgOptions {
    // Coordinates drawn for data of dimension != 2; without it such input is rejected.
    bool project = false;
    std::size_t axis_x = 0;
    std::size_t axis_y = 1;
    double width = 800.0;
    bool markers = false;  // vertex circles coloured by birth generation
};

// One <line> for two points, one <polyline> otherwise, nothing for fewer.
std::string render_svg(const PointCloud& polyline, const SvgOptions& opt = {}, const std::vector<int>& birth = {});

}  // namespace atsp
