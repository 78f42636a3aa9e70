#include "atsp/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace atsp {

void to_json(nlohmann::json& j, const Check& c) {
    j = nlohmann::json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold},
                       {"rule", c.rule}};
}

bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("CsvTable: row width does not match " + name);
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out = "# schema: " + name + "/v" + std::to_string(version) + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

std::string fmt(long long x) { return std::to_string(x); }

std::string git_blob_sha1(const std::string& body) {
    std::string blob = "blob " + std::to_string(body.size());
    blob.push_back('\0');
    blob += body;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("git_blob_sha1: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string config_hash(const nlohmann::json& config) { return git_blob_sha1(config.dump()); }

SnowflakeMode parse_mode(const std::string& mode) {
    if (mode == "planar") return SnowflakeMode::Planar;
    if (mode == "lp") return SnowflakeMode::Lp;
    throw std::invalid_argument("unknown mode '" + mode + "' (planar or lp)");
}

std::string mode_name(SnowflakeMode m) { return m == SnowflakeMode::Planar ? "planar" : "lp"; }

CurveSpec parse_curve(const std::string& name, const std::string& mode, double p) {
    CurveSpec c;
    c.name = name;
    c.p = p;
    c.schedule = name == "segment" ? HeightSchedule::constant(0.0) : HeightSchedule::parse(name, p);
    if (mode.empty()) {
        bool planar_family = name == "prop2" || name == "prop4" ||
                             ((name == "segment" || c.schedule.kind == HeightSchedule::Kind::Constant) && p == 2.0);
        c.mode = planar_family ? SnowflakeMode::Planar : SnowflakeMode::Lp;
    } else {
        c.mode = parse_mode(mode);
    }
    if (c.mode == SnowflakeMode::Planar) c.p = 2.0;
    if (!(c.p > 1.0)) throw std::invalid_argument("parse_curve: p must exceed 1");
    return c;
}

namespace {

nlohmann::json curve_json(const CurveSpec& c) {
    return {{"name", c.name}, {"mode", mode_name(c.mode)}, {"p", c.p}, {"schedule", c.schedule.describe()}};
}

void check_generation(const CurveSpec& c, int n) {
    GenerateOptions g;
    int cap = c.mode == SnowflakeMode::Planar ? g.max_planar : g.max_lp;
    if (n < 1 || n > cap)
        throw std::invalid_argument("generation " + std::to_string(n) + " outside 1.." + std::to_string(cap) +
                                    " for " + mode_name(c.mode) + " curves");
}

struct GenerationSums {
    std::size_t points = 0;
    int k_cutoff = 0;
    double length = 0.0;
    std::vector<JonesSum> sums;
};

// Vertex set of generation n, nets from the diameter level to the spacing
// cutoff, one beta evaluation shared by all exponents.
GenerationSums generation_sums(const CurveSpec& c, int n, double A, int margin, std::uint64_t seed,
                               const std::vector<double>& exponents) {
    auto curve = generate(c.schedule, c.mode, c.p, n);
    GenerationSums g;
    g.points = curve.vertices.size();
    g.length = length_pnorm(curve);
    g.k_cutoff = finest_level_for_spacing(A, curve.r_n, margin);
    double diam = diameter(curve.vertices);
    int k_min = diam_level(diam);
    if (g.k_cutoff < k_min)
        throw std::invalid_argument("generation " + std::to_string(n) + " is too coarse for A = " + fmt(A) +
                                    " and margin " + std::to_string(margin));
    auto h = build_nets(curve.vertices, k_min, g.k_cutoff, seed);
    auto G = make_family(std::move(h), A);
    FitCache cache;
    auto betas = evaluate_family(curve.vertices, G, g.k_cutoff, &cache);
    for (double r : exponents) g.sums.push_back(jones_sum_from(betas, diam, A, k_min, r, g.k_cutoff));
    return g;
}

nlohmann::json checks_json(const std::vector<Check>& checks) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : checks) a.push_back(c);
    return a;
}

}  // namespace

// ------------------------------------------------------------------ sharpness

Proposition parse_proposition(const std::string& s) {
    if (s == "prop2") return Proposition::Prop2;
    if (s == "prop4") return Proposition::Prop4;
    if (s == "prop3") return Proposition::Prop3;
    if (s == "prop1") return Proposition::Prop1;
    throw std::invalid_argument("unknown proposition '" + s + "' (prop1, prop2, prop3, prop4)");
}

std::string proposition_name(Proposition p) {
    switch (p) {
        case Proposition::Prop2: return "prop2";
        case Proposition::Prop4: return "prop4";
        case Proposition::Prop3: return "prop3";
        case Proposition::Prop1: return "prop1";
    }
    return "?";
}

nlohmann::json to_json(const SharpnessConfig& c) {
    return {{"experiment", "sharpness"},
            {"proposition", proposition_name(c.prop)},
            {"p", c.p},
            {"eps", c.eps},
            {"n_min", c.n_min},
            {"n", c.n},
            {"A", c.A},
            {"A_lower", c.A_lower},
            {"margin", c.margin},
            {"seed", c.seed},
            {"rules",
             {{"decay_ratio_max", c.rules.decay_ratio_max},
              {"decay_from", c.rules.decay_from},
              {"growth_multiple", c.rules.growth_multiple},
              {"growth_base", c.rules.growth_base},
              {"growth_top", c.rules.growth_top}}}};
}

SharpnessReport run_sharpness(const SharpnessConfig& cfg) {
    if (!(cfg.eps >= 0.0)) throw std::invalid_argument("sharpness: eps must be >= 0");
    if (!(cfg.A > 1.0) || !(cfg.A_lower > 1.0)) throw std::invalid_argument("sharpness: A must exceed 1");
    if (cfg.n_min < 1 || cfg.n < cfg.n_min) throw std::invalid_argument("sharpness: need 1 <= n_min <= n");
    if (cfg.margin < 0) throw std::invalid_argument("sharpness: margin must be >= 0");
    if (cfg.rules.growth_top <= cfg.rules.growth_base) throw std::invalid_argument("sharpness: growth_top <= growth_base");

    SharpnessReport R;
    R.config = cfg;
    bool planar = cfg.prop == Proposition::Prop2 || cfg.prop == Proposition::Prop4;
    R.curve = parse_curve(proposition_name(cfg.prop), planar ? "planar" : "lp", planar ? 2.0 : cfg.p);
    check_generation(R.curve, cfg.n);
    R.crit = planar ? 2.0 : R.curve.p;
    bool divergent_sum = cfg.prop == Proposition::Prop4 || cfg.prop == Proposition::Prop1;
    if (!(R.crit - cfg.eps > 0.0)) throw std::invalid_argument("sharpness: eps must be below the critical exponent");
    std::vector<double> exps{R.crit - cfg.eps, R.crit, R.crit + cfg.eps};

    auto brackets = length_brackets(R.curve.schedule, R.curve.mode, R.curve.p, cfg.n);
    for (int n = cfg.n_min; n <= cfg.n; ++n) {
        auto g = generation_sums(R.curve, n, cfg.A, cfg.margin, cfg.seed, exps);
        SharpnessGeneration row;
        row.n = n;
        row.points = g.points;
        row.k_cutoff = g.k_cutoff;
        const auto& b = brackets[static_cast<std::size_t>(n - 1)];
        row.length = b.value;
        row.length_lower = b.lower;
        row.length_upper = b.upper;
        row.exponents = exps;
        for (const auto& J : g.sums) row.S.push_back(J.total);
        if (n == cfg.n) R.increments = g.sums[2].per_level;
        R.generations.push_back(std::move(row));
    }
    R.increment_exponent = exps[2];

    // Geometric mean ratio of level increments from decay_from to the cutoff.
    int from = cfg.rules.decay_from;
    const LevelSum* first = nullptr;
    const LevelSum* last = nullptr;
    for (const auto& l : R.increments) {
        if (l.k < from) continue;
        if (!first) first = &l;
        last = &l;
    }
    if (first && last && last->k > first->k && first->contribution > 0.0) {
        R.decay_levels = last->k - first->k;
        R.decay_ratio = std::pow(last->contribution / first->contribution, 1.0 / R.decay_levels);
    } else {
        R.decay_ratio = INFINITY;
    }

    // beta(k) >= (r_m / A 2^-k) c eta_m with 6 4^-m <= A 2^-k < 6 4^-(m-1),
    // from k1 on, where A 2^-k < 6 and log4(6/A) + 3 <= k/2.
    R.lower_exponent = divergent_sum ? R.crit - cfg.eps : R.crit;
    R.lower_constant = planar ? std::sqrt(3.0) / 4.0 : 0.25;
    double A = cfg.A_lower;
    int k = static_cast<int>(std::floor(std::log2(A / 6.0)));
    while (A * std::ldexp(1.0, -k) >= 6.0) ++k;
    while (std::log(6.0 / A) / std::log(4.0) + 3.0 > 0.5 * k) ++k;
    R.k1 = k;
    int top = cfg.rules.growth_top;
    int m_max = top / 2 + 8;
    auto r = edge_lengths(R.curve.schedule, R.curve.mode, R.curve.p, m_max);
    double partial = 0.0, base_partial = 0.0;
    for (int kk = R.k1; kk <= top; ++kk) {
        LowerBoundTerm t;
        t.k = kk;
        t.radius = A * std::ldexp(1.0, -kk);
        int m = 1;
        while (6.0 * std::pow(4.0, -m) > t.radius) ++m;
        if (m > m_max) throw std::logic_error("sharpness: scale index out of range");
        t.m = m;
        t.r_m = r[m];
        t.eta_m = R.curve.schedule.eta(m);
        t.lower = t.r_m / t.radius * R.lower_constant * t.eta_m;
        t.term = std::pow(t.lower, R.lower_exponent);
        partial += t.term;
        t.partial = partial;
        t.scale_ok = 2.0 * t.r_m <= t.radius;
        if (kk == std::max(cfg.rules.growth_base, R.k1)) base_partial = partial;
        R.lower_series.push_back(t);
    }
    R.growth_ratio = base_partial > 0.0 && cfg.rules.growth_base <= top ? partial / base_partial : 0.0;

    bool brackets_ok = true, increasing = true;
    double upper_max = 0.0;
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        brackets_ok = brackets_ok && brackets[i].holds;
        upper_max = std::max(upper_max, brackets[i].upper);
        if (i > 0 && !(brackets[i].value > brackets[i - 1].value)) increasing = false;
    }
    R.checks.push_back({"length-bracket", brackets_ok, 0.0, 0.0,
                        "Lip(gamma_n) inside its exponential bracket for n = 1.." + std::to_string(cfg.n)});
    if (divergent_sum)
        R.checks.push_back({"length-bounded", upper_max < 3.0, upper_max, 3.0,
                            "upper length bracket below 3 at every generation"});
    else
        R.checks.push_back({"length-increasing", increasing, brackets.back().value, brackets.front().value,
                            "Lip(gamma_n) strictly increasing in n"});
    R.checks.push_back({"increment-decay", R.decay_ratio < cfg.rules.decay_ratio_max, R.decay_ratio,
                        cfg.rules.decay_ratio_max,
                        "geometric mean ratio of level increments of S at exponent " + fmt(exps[2]) +
                            " from level " + std::to_string(from) + " to the cutoff, generation " +
                            std::to_string(cfg.n)});
    bool scale_ok = std::all_of(R.lower_series.begin(), R.lower_series.end(),
                                [](const LowerBoundTerm& t) { return t.scale_ok && t.term > 0.0; });
    R.checks.push_back({"lower-bound-scales", scale_ok, 0.0, 0.0,
                        "2 r_m <= A 2^-k and positive terms for k = k1.." + std::to_string(top)});
    R.checks.push_back({"lower-bound-growth", R.growth_ratio > cfg.rules.growth_multiple, R.growth_ratio,
                        cfg.rules.growth_multiple,
                        "lower-bound partial sum at exponent " + fmt(R.lower_exponent) + ", level " +
                            std::to_string(top) + " over level " +
                            std::to_string(std::max(cfg.rules.growth_base, R.k1))});
    R.pass = all_pass(R.checks);
    return R;
}

nlohmann::json to_json(const SharpnessReport& R) {
    nlohmann::json j;
    j["config"] = to_json(R.config);
    j["config_hash"] = config_hash(j["config"]);
    j["curve"] = curve_json(R.curve);
    j["critical_exponent"] = R.crit;
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : R.generations)
        gens.push_back({{"generation", g.n},
                        {"points", g.points},
                        {"k_cutoff", g.k_cutoff},
                        {"length", g.length},
                        {"length_lower", g.length_lower},
                        {"length_upper", g.length_upper},
                        {"exponents", g.exponents},
                        {"partial_sums", g.S}});
    j["generations"] = gens;
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& l : R.increments)
        inc.push_back({{"k", l.k}, {"balls", l.balls}, {"increment", l.contribution}, {"max_beta", l.max_beta}});
    j["increments"] = {{"generation", R.config.n},
                       {"exponent", R.increment_exponent},
                       {"levels", inc},
                       {"decay_ratio", R.decay_ratio},
                       {"decay_levels", R.decay_levels}};
    nlohmann::json lb = nlohmann::json::array();
    for (const auto& t : R.lower_series)
        lb.push_back({{"k", t.k},
                      {"m", t.m},
                      {"radius", t.radius},
                      {"r_m", t.r_m},
                      {"eta_m", t.eta_m},
                      {"lower", t.lower},
                      {"term", t.term},
                      {"partial", t.partial},
                      {"scale_ok", t.scale_ok}});
    j["lower_series"] = {{"exponent", R.lower_exponent},
                         {"A", R.config.A_lower},
                         {"constant", R.lower_constant},
                         {"k1", R.k1},
                         {"terms", lb},
                         {"growth_ratio", R.growth_ratio}};
    j["verdict_rules"] =
        "convergence: geometric mean ratio of level increments below decay_ratio_max; divergence: the vertex "
        "lower-bound series is monotone with partial sum at growth_top above growth_multiple times its value at "
        "growth_base. Every value is a partial sum at the stated generation and cutoff, not a limit.";
    j["checks"] = checks_json(R.checks);
    j["pass"] = R.pass;
    return j;
}

std::vector<CsvTable> tables(const SharpnessReport& R) {
    CsvTable g{"sharpness.generations", 1,
               {"generation", "points", "k_cutoff", "length", "length_lower", "length_upper", "S_low", "S_crit",
                "S_high"},
               {}};
    for (const auto& x : R.generations)
        g.add({fmt(static_cast<long long>(x.n)), fmt(static_cast<long long>(x.points)),
               fmt(static_cast<long long>(x.k_cutoff)), fmt(x.length), fmt(x.length_lower), fmt(x.length_upper),
               fmt(x.S[0]), fmt(x.S[1]), fmt(x.S[2])});
    CsvTable inc{"sharpness.increments", 1, {"generation", "k", "balls", "exponent", "increment", "max_beta"}, {}};
    for (const auto& l : R.increments)
        inc.add({fmt(static_cast<long long>(R.config.n)), fmt(static_cast<long long>(l.k)),
                 fmt(static_cast<long long>(l.balls)), fmt(R.increment_exponent), fmt(l.contribution),
                 fmt(l.max_beta)});
    CsvTable lb{"sharpness.lower_series", 1,
                {"k", "m", "radius", "r_m", "eta_m", "lower", "exponent", "term", "partial", "scale_ok"},
                {}};
    for (const auto& t : R.lower_series)
        lb.add({fmt(static_cast<long long>(t.k)), fmt(static_cast<long long>(t.m)), fmt(t.radius), fmt(t.r_m),
                fmt(t.eta_m), fmt(t.lower), fmt(R.lower_exponent), fmt(t.term), fmt(t.partial),
                t.scale_ok ? "1" : "0"});
    return {g, inc, lb};
}

// --------------------------------------------------------------------- pq gap

nlohmann::json to_json(const PqGapConfig& c) {
    return {{"experiment", "pq-gap"},
            {"p", c.p},
            {"q", c.q},
            {"n", c.n},
            {"edge_check_max", c.edge_check_max},
            {"p_growth_min", c.p_growth_min}};
}

PqGapReport run_pq_gap(const PqGapConfig& cfg) {
    if (!(cfg.p > 1.0)) throw std::invalid_argument("pq-gap: p must exceed 1");
    if (cfg.q.empty()) throw std::invalid_argument("pq-gap: need at least one q");
    for (double q : cfg.q)
        if (!(q >= cfg.p)) throw std::invalid_argument("pq-gap: every q must be >= p");
    if (cfg.n < 1) throw std::invalid_argument("pq-gap: n must be >= 1");

    PqGapReport R;
    R.config = cfg;
    R.schedule = HeightSchedule::pq(cfg.p);
    for (int n = 1; n <= cfg.n; ++n) {
        PqRow row;
        row.n = n;
        row.p_length = lp_curve_qlength(R.schedule, cfg.p, cfg.p, n);
        for (double q : cfg.q) {
            row.q_length.push_back(lp_curve_qlength(R.schedule, cfg.p, q, n));
            row.q_bound.push_back(q > cfg.p ? qlength_bound(R.schedule, cfg.p, q, n) : INFINITY);
        }
        R.rows.push_back(std::move(row));
    }
    R.p_growth = R.rows.back().p_length / R.rows.front().p_length;

    bool increasing = true;
    for (std::size_t i = 1; i < R.rows.size(); ++i)
        if (!(R.rows[i].p_length > R.rows[i - 1].p_length)) increasing = false;
    R.checks.push_back({"p-length-increasing", increasing, R.rows.back().p_length, R.rows.front().p_length,
                        "l_p length strictly increasing over n = 1.." + std::to_string(cfg.n)});
    R.checks.push_back({"p-length-growth", R.p_growth > cfg.p_growth_min, R.p_growth, cfg.p_growth_min,
                        "l_p length at n = " + std::to_string(cfg.n) + " over n = 1"});
    for (std::size_t qi = 0; qi < cfg.q.size(); ++qi) {
        double q = cfg.q[qi];
        if (q > cfg.p) {
            double worst = 0.0;
            bool ok = true;
            for (const auto& row : R.rows) {
                worst = std::max(worst, row.q_length[qi] / row.q_bound[qi]);
                ok = ok && row.q_length[qi] < row.q_bound[qi];
            }
            R.checks.push_back({"q-length-bound q=" + fmt(q), ok, worst, 1.0,
                                "max over n of l_q length / exp(C_q sum eta_i^q i^(q/p-1))"});
        } else {
            double worst = 0.0;
            for (const auto& row : R.rows)
                worst = std::max(worst, std::abs(row.q_length[qi] - row.p_length) / row.p_length);
            R.checks.push_back({"q-equals-p", worst <= 1e-12, worst, 1e-12, "relative gap of l_q and l_p lengths"});
        }
    }

    int ne = std::min(cfg.n, cfg.edge_check_max);
    auto curve = generate(R.schedule, SnowflakeMode::Lp, cfg.p, ne);
    bool edges_ok = true;
    for (std::size_t i = 0; i < curve.edges.size(); ++i) {
        double ep = lp_norm(curve.edges[i], cfg.p);
        for (double q : cfg.q) {
            double ratio = lp_norm(curve.edges[i], q) / ep;
            R.edge_worst = std::max(R.edge_worst, ratio);
            edges_ok = edges_ok && ratio <= 1.0 + 1e-14;
        }
        ++R.edges_checked;
    }
    R.checks.push_back({"edge-norm-monotone", edges_ok, R.edge_worst, 1.0,
                        "|e|_q <= |e|_p on every edge of generation " + std::to_string(ne) +
                            ", relative slack 1e-14"});
    R.pass = all_pass(R.checks);
    return R;
}

nlohmann::json to_json(const PqGapReport& R) {
    nlohmann::json j;
    j["config"] = to_json(R.config);
    j["config_hash"] = config_hash(j["config"]);
    j["schedule"] = R.schedule.describe();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : R.rows)
        rows.push_back({{"generation", r.n}, {"p_length", r.p_length}, {"q_length", r.q_length},
                        {"q_bound", r.q_bound}});
    j["rows"] = rows;
    j["p_growth"] = R.p_growth;
    j["edges_checked"] = R.edges_checked;
    j["edge_worst_ratio"] = R.edge_worst;
    j["checks"] = checks_json(R.checks);
    j["pass"] = R.pass;
    return j;
}

CsvTable table(const PqGapReport& R) {
    CsvTable t{"pq_gap", 1, {"generation", "p", "p_length", "q", "q_length", "q_bound"}, {}};
    for (const auto& r : R.rows)
        for (std::size_t i = 0; i < R.config.q.size(); ++i)
            t.add({fmt(static_cast<long long>(r.n)), fmt(R.config.p), fmt(r.p_length), fmt(R.config.q[i]),
                   fmt(r.q_length[i]), fmt(r.q_bound[i])});
    return t;
}

// ------------------------------------------------------------ necessary check

nlohmann::json to_json(const NecessaryConfig& c) {
    return {{"experiment", "necessary-check"},
            {"curve", c.curve},
            {"mode", c.mode},
            {"p", c.p},
            {"A", c.A},
            {"n_min", c.n_min},
            {"n_max", c.n_max},
            {"margin", c.margin},
            {"band", c.band},
            {"seed", c.seed}};
}

NecessaryReport run_necessary_check(const NecessaryConfig& cfg) {
    if (!(cfg.A > 1.0)) throw std::invalid_argument("necessary-check: A must exceed 1");
    if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) throw std::invalid_argument("necessary-check: need 1 <= n_min <= n_max");
    if (!(cfg.band >= 1.0)) throw std::invalid_argument("necessary-check: band must be >= 1");
    NecessaryReport R;
    R.config = cfg;
    R.curve = parse_curve(cfg.curve, cfg.mode, cfg.p);
    check_generation(R.curve, cfg.n_max);
    R.exponent = std::max(2.0, R.curve.p);
    R.ratio_min = INFINITY;
    R.ratio_max = 0.0;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        auto g = generation_sums(R.curve, n, cfg.A, cfg.margin, cfg.seed, {R.exponent});
        NecessaryRow row{n, g.points, g.k_cutoff, g.length, g.sums[0].total, g.sums[0].total / g.length};
        R.ratio_min = std::min(R.ratio_min, row.ratio);
        R.ratio_max = std::max(R.ratio_max, row.ratio);
        R.rows.push_back(row);
    }
    R.checks.push_back({"ratio-band", R.ratio_max <= cfg.band * R.ratio_min, R.ratio_max / R.ratio_min, cfg.band,
                        "max over min of S_{max(2,p)} / length across generations " + std::to_string(cfg.n_min) +
                            ".." + std::to_string(cfg.n_max)});
    R.pass = all_pass(R.checks);
    return R;
}

nlohmann::json to_json(const NecessaryReport& R) {
    nlohmann::json j;
    j["config"] = to_json(R.config);
    j["config_hash"] = config_hash(j["config"]);
    j["curve"] = curve_json(R.curve);
    j["exponent"] = R.exponent;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : R.rows)
        rows.push_back({{"generation", r.n},
                        {"points", r.points},
                        {"k_cutoff", r.k_cutoff},
                        {"length", r.length},
                        {"jones_partial", r.S},
                        {"ratio", r.ratio}});
    j["rows"] = rows;
    j["ratio_min"] = R.ratio_min;
    j["ratio_max"] = R.ratio_max;
    j["checks"] = checks_json(R.checks);
    j["pass"] = R.pass;
    return j;
}

CsvTable table(const NecessaryReport& R) {
    CsvTable t{"necessary_check", 1, {"generation", "points", "k_cutoff", "exponent", "length", "jones_partial", "ratio"},
               {}};
    for (const auto& r : R.rows)
        t.add({fmt(static_cast<long long>(r.n)), fmt(static_cast<long long>(r.points)),
               fmt(static_cast<long long>(r.k_cutoff)), fmt(R.exponent), fmt(r.length), fmt(r.S), fmt(r.ratio)});
    return t;
}

// ------------------------------------------------------------------------ SVG

std::string render_svg(const PointCloud& poly, const SvgOptions& opt, const std::vector<int>& birth) {
    std::size_t ax = 0, ay = 1;
    if (poly.dim() != 2 || opt.project) {
        if (!opt.project)
            throw std::invalid_argument("render_svg: data has dimension " + std::to_string(poly.dim()) +
                                        "; give two axes to project onto");
        ax = opt.axis_x;
        ay = opt.axis_y;
        if (!poly.empty() && (ax >= poly.dim() || ay >= poly.dim() || ax == ay))
            throw std::invalid_argument("render_svg: bad projection axes");
    }
    if (!birth.empty() && birth.size() != poly.size())
        throw std::invalid_argument("render_svg: birth list does not match the vertices");
    const std::size_t n = poly.size();
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (n > 0) {
        x0 = x1 = poly[0][ax];
        y0 = y1 = -poly[0][ay];
        for (std::size_t i = 1; i < n; ++i) {
            x0 = std::min(x0, poly[i][ax]);
            x1 = std::max(x1, poly[i][ax]);
            y0 = std::min(y0, -poly[i][ay]);
            y1 = std::max(y1, -poly[i][ay]);
        }
    }
    double span = std::max(x1 - x0, y1 - y0);
    if (!(span > 0.0)) span = 1.0;
    double pad = 0.02 * span;
    double w = x1 - x0 + 2 * pad, h = y1 - y0 + 2 * pad;
    double height = opt.width * h / w;
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(opt.width) + "\" height=\"" +
                    fmt(height) + "\" viewBox=\"" + fmt(x0 - pad) + " " + fmt(y0 - pad) + " " + fmt(w) + " " +
                    fmt(h) + "\">\n";
    auto X = [&](std::size_t i) { return fmt(poly[i][ax]); };
    auto Y = [&](std::size_t i) { return fmt(-poly[i][ay]); };
    const char* stroke = " fill=\"none\" stroke=\"black\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\"";
    if (n == 2) {
        s += "<line x1=\"" + X(0) + "\" y1=\"" + Y(0) + "\" x2=\"" + X(1) + "\" y2=\"" + Y(1) + "\"" + stroke + "/>\n";
    } else if (n > 2) {
        s += "<polyline points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += X(i) + "," + Y(i);
        }
        s += "\"" + std::string(stroke) + "/>\n";
    }
    if (opt.markers && n > 0) {
        static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
        std::string r = fmt(0.004 * span);
        for (std::size_t i = 0; i < n; ++i) {
            int b = birth.empty() ? 0 : birth[i];
            s += "<circle cx=\"" + X(i) + "\" cy=\"" + Y(i) + "\" r=\"" + r + "\" fill=\"" + palette[b % 8] +
                 "\" data-birth=\"" + std::to_string(b) + "\"/>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

}  // namespace atsp
