#pragma once

#include <climits>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "atsp/beta.hpp"
#include "atsp/lp_core.hpp"
#include "atsp/nets.hpp"
#include "atsp/projections.hpp"

namespace atsp {

// Nested point sets V_0 c V_1 c ... of a ground set with scales rho_k, plus a
// flatness number alpha and an approximating line for every (k, v).
struct NetSequenceData {
    std::shared_ptr<const PointCloud> points;
    // V[k] lists ground indices in net insertion order; V[k] is a prefix of V[k + 1].
    std::vector<std::vector<std::size_t>> V;
    std::vector<double> rho;
    std::size_t x0 = 0;
    double r0 = 1.0;
    double C_star = 2.0;
    double xi1 = 0.5;
    double xi2 = 0.5;
    // C*/(1 - xi2) evaluates to 4 for these parameters; the sufficiency argument
    // works with 8, so that 30 A* = 240 <= A_G. The larger value gives larger
    // windows for the line condition and the flat pairs.
    double A_star = 8.0;
    int k0 = 0;
    double A_G = 240.0;
    // Indexed like V.
    std::vector<std::vector<double>> alpha;
    std::vector<std::vector<double>> beta;
    std::vector<std::vector<Line>> lines;
    // Window betas in the layout of evaluate_family, for Jones sums.
    std::vector<BallBeta> ball_betas;

    std::size_t levels() const { return V.size(); }
    const PointCloud& E() const { return *points; }
    // xi1 (1 - xi2) / (87 C*)
    double alpha1() const { return xi1 * (1.0 - xi2) / (87.0 * C_star); }
};

class AxiomViolation : public std::runtime_error {
public:
    AxiomViolation(std::string axiom, int k, std::size_t v, const std::string& detail);
    std::string axiom;
    int k;
    std::size_t v;  // ground index, or npos when the axiom is about scales
};

struct AxiomReport {
    bool ok = true;
    std::string axiom;  // first failing axiom, e.g. "V3"
    int k = -1;
    std::size_t v = static_cast<std::size_t>(-1);
    std::string message;
};

// Exhaustive check of the six axioms. Distances compare with relative slack
// kBallSlack; the line condition also allows 1e-12 rho_k r0 of rounding.
AxiomReport verify_axioms(const NetSequenceData& data);

// Levels V_k = X_{k0 + k} for k0 <= k0 + k <= h.k_max, where 2^-k0 <= diam E < 2^(1-k0).
// alpha_{k,v} = 8 A_G beta_E(B(v, A_G 2^-(k0+k))), line = the fit witness.
// Throws AxiomViolation when a check fails, invalid_argument when A_G < 240 or
// the hierarchy does not reach down to k0.
NetSequenceData from_multiresolution(const PointCloud& E, const NetHierarchy& h, double A_G,
                                     const FitOptions& opt = {}, FitCache* cache = nullptr);

struct FlatPair {
    std::size_t v;
    std::size_t vp;
    int side;  // -1: v' precedes v in the L_{k,v} order, +1: follows
};

struct FlatPairSet {
    int k = 0;
    double alpha0 = 0.0;
    std::vector<FlatPair> pairs;
};

// alpha0 <= 0 selects alpha1(). Vertices by ascending ground index, left then right.
FlatPairSet flat_pairs(const NetSequenceData& data, int k, double alpha0 = 0.0);

// Points of V_{k+1} between v and v' in the L_{k,v} order (inclusive), v first.
std::vector<std::size_t> between_chain(const NetSequenceData& data, int k, const FlatPair& pair);

// tau_s(k, v, v').
double variation_excess(const NetSequenceData& data, int k, const FlatPair& pair, double s);

struct NetSums {
    double s = 1.0;
    double alpha0 = 0.0;
    double S_s = 0.0;    // tau_s rho_k^s over flat pairs + rho_k^s over alpha >= alpha0
    double S_1 = 0.0;    // the same with s = 1
    double S_V = 0.0;    // sum alpha rho_k
    double S_rho = 0.0;  // sum rho_X(102 alpha) rho_k, with rho_upper
    bool cross_ok = true;  // S_1 <= S_V / alpha1
    std::size_t flat_pairs = 0;
    std::size_t non_flat = 0;
    double worst_tau1_ratio = 0.0;  // max tau_1 / (6 alpha + 9 alpha^2) over flat pairs
    bool tau1_ok = true;            // tau_1 <= 6 alpha + 9 alpha^2 <= 7 alpha everywhere
};

NetSums sums(const NetSequenceData& data, double s, double alpha0 = 0.0);

struct CurveBuild {
    std::vector<std::size_t> tour;  // ground indices, open polyline
    double length = 0.0;
    double max_attach = 0.0;  // largest distance from an inserted point to its attachment vertex
    double ceiling = 0.0;     // #tour * 2 * max_attach
    std::size_t flat_insertions = 0;
    std::size_t cheapest_insertions = 0;
};

// Refines an ordered tour level by level. Each new point goes next to its
// nearest parent in V_k: by the parent's line order when alpha < alpha0,
// otherwise at the cheaper of the parent's two tour edges.
// Levels ascending, new points by ground index within a level.
CurveBuild build_curve(const NetSequenceData& data, double alpha0 = 0.0);

double polyline_length(const PointCloud& E, const std::vector<std::size_t>& tour);

struct CertificateReport {
    double diam = 0.0;
    int k0 = 0;
    int k_max = 0;
    double s_exponent = 1.0;
    double jones = 0.0;  // diam E + sum over levels k0..k_max
    double length = 0.0;
    double ratio = 0.0;  // length / jones
    std::size_t points = 0;
    std::size_t tour_points = 0;
    bool covers_all = false;  // the tour visits all of E
    std::vector<std::size_t> tour;
    NetSums sums;
    AxiomReport axioms;
};

struct CertificateOptions {
    // Finest level. By default the first level at which every window holds a
    // single point, so the sum over k >= k0 is complete; capped at k0 + max_levels.
    int k_max = INT_MIN;
    int max_levels = 40;
    std::uint64_t seed = 0;
    FitOptions fit;
};

// nets -> data -> sums -> build_curve, and length / (diam E + Jones sum with exponent s).
CertificateReport certificate_check(const PointCloud& E, double A_G, double s_exponent,
                                    const CertificateOptions& opt = {});

}  // namespace atsp
