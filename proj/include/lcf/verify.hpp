#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcf/fn_grid.hpp"
#include "lcf/grid.hpp"
#include "lcf/legendre.hpp"
#include "lcf/santalo.hpp"

namespace lcf {

/// One pass/fail decision with the numbers it was based on.
struct Verdict {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct PipelineStep {
    std::size_t i = 0;  // 1-based
    Hyperplane hyperplane;
    double lambda = 0.5;        // achieved split of f_{i-1} by H_i
    Point z;                    // z_i
    double mass = 0.0;          // ∫ f_i
    double polar_mass = 0.0;    // ∫ f_i^{z_i} = ∫ S_{H_i}(f_{i-1}^{z_i})
    double pre_polar_mass = 0.0;  // ∫ f_{i-1}^{z_i}
    double product = 0.0;       // mass · polar_mass
    double involution_residual = 0.0;
    bool santalo_converged = false;
};

struct PipelineReport {
    std::size_t dim = 0;
    double lambda_requested = 0.5;
    double lambda_1 = 0.5;  // achieved
    double initial_mass = 0.0;        // ∫ f
    double initial_polar_mass = 0.0;  // ∫ f^{z_1}
    double initial_product = 0.0;
    double bound = 0.0;  // (2π)^n / (4λ(1-λ))
    std::vector<PipelineStep> steps;
    std::vector<double> final_symmetry_defects;  // per axis, relative to max f_n
    std::vector<Verdict> verdicts;
    bool aborted = false;
    std::string error;

    bool passed() const;
};

struct PipelineOptions {
    double eps_mono = 1e-6;
    double eps_ineq = 1e-6;
    double eps_tot = 0.02;
    double eps_sym = 1e-12;
    /// Snap the medial hyperplanes H_2..H_n to x-grid nodes. The y-grid always
    /// carries H_i as a node because it moves with z_i.
    bool snap_medial = true;
    SantaloOptions santalo;
};

/// The n-step symmetrization procedure. f_i is recovered from f_i^{z_i} by a
/// second polar onto f's grid translated so that z_i is its middle node.
/// Errors abort the run and are reported in `error` with aborted = true.
PipelineReport run_pipeline(const LogConcaveFnGrid& f, const Hyperplane& h1, double lambda,
                            const ConjugatePlan& plan, const PipelineOptions& options = {});
/// Finds H_1 orthogonal to `axis` with lambda_split first.
PipelineReport run_pipeline(const LogConcaveFnGrid& f, std::size_t axis, double lambda, const ConjugatePlan& plan,
                            const PipelineOptions& options = {});

struct SeparationReport {
    double lambda = 0.0;  // ∫_{H+} f^z / ∫ f^z
    double lhs = 0.0;     // ∫ (S_H f)^z
    double rhs = 0.0;     // 4λ(1-λ) ∫ f^z
    bool ok = false;
};

/// ∫ (S_H f)^z ≥ 4λ(1-λ) ∫ f^z with λ measured from f^z. H must be a node of
/// f's grid and z must lie on H.
SeparationReport verify_separation_lemma(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                                         const ConjugatePlan& plan, double eps_ineq = 1e-6);

struct SliceSample {
    double s = 0.0;
    double t = 0.0;
    double worst_ratio = 0.0;  // max lhs / allowed rhs over slice nodes
    bool ok = false;
};

struct SliceReport {
    std::vector<SliceSample> samples;
    double worst_ratio = 0.0;
    bool ok = false;
};

/// Slice inequality of the separation lemma: for heights s, t > 0 above and
/// below H,
///   ((t/(s+t))·F_s) ⋆ ((s/(s+t))·F_{-t}) ≤ R_{2st/(s+t)}
/// where F_h is the slice of f^z at height h and R_h the slice of (S_H f)^z.
/// R is interpolated log-linearly between slices; each node may use the
/// largest value among its neighbouring nodes and slices (one cell).
SliceReport slice_inequality_check(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                                   const ConjugatePlan& plan, int samples, std::uint64_t seed = 7,
                                   double eps_slice = 1e-6);

/// Three positive functions sampled on a uniform grid of [0, T].
struct BallTriple {
    std::vector<double> w;  // w[0] = 0, uniform
    std::vector<double> f0, f1, f2;
};

struct BallLemmaReport {
    bool hypothesis_ok = false;
    double worst_hypothesis_ratio = 0.0;  // max rhs / lhs of the hypothesis
    double witness_x = 0.0;
    double witness_y = 0.0;
    double lhs = 0.0;  // 1 / ∫F0
    double rhs = 0.0;  // (1/∫F1 + 1/∫F2) / 2
    bool ok = false;
};

/// Checks F0(2xy/(x+y)) ≥ F1(x)^{y/(x+y)} F2(y)^{x/(x+y)} on sample pairs and
/// then 1/∫F0 ≤ (1/∫F1 + 1/∫F2)/2 · (1+ε). Throws HypothesisFailed (message
/// carries the worst pair) when the hypothesis fails. Each argument gets a
/// one-cell allowance: F1, F2 at their lowest over a node and its neighbours,
/// F0 at its highest over the nodes bracketing 2xy/(x+y) and the node below.
/// Pairs whose right-hand
/// side is below floor_rel · max(F) carry no mass and are skipped.
BallLemmaReport ball_lemma_check(const BallTriple& triple, double eps_ineq = 1e-6, double eps_hyp = 1e-6,
                                 std::size_t max_pairs_per_axis = 256, double floor_rel = 1e-12);

/// Slice masses of (S_H f)^z (F0) and of f^z above (F1) and below (F2) H.
BallTriple separation_triple(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                             const ConjugatePlan& plan);

struct UnconditionalReport {
    Point center;
    double mass = 0.0;
    double polar_mass = 0.0;
    double product = 0.0;
    double bound = 0.0;  // (2π)^n
    double ratio = 0.0;  // product / bound
    std::vector<double> symmetry_defects;
    bool ok = false;
};

/// ∫f · ∫f^{center} ≤ (2π)^n for f unconditional about `center` (default: the
/// middle node). Throws NotUnconditional.
UnconditionalReport unconditional_product_check(const LogConcaveFnGrid& f, const ConjugatePlan& plan,
                                                std::optional<Point> center = std::nullopt, double eps_sym = 1e-12,
                                                double eps_tot = 0.02);

struct InvarianceReport {
    Point z;        // s_G(f)
    Point z_after;  // s_G(g), g^z = S_H(f^z)
    double drift = 0.0;
    double tolerance = 0.0;
    double symmetry_defect = 0.0;  // of g^z about H, relative to max g^z
    bool ok = false;
};

/// s_G(g) = s_G(f) for g defined by g^z = S_H(f^z), z = s_G(f), G ⊂ H.
InvarianceReport verify_santalo_invariance(const LogConcaveFnGrid& f, const AffineSubspace& g, const Hyperplane& h,
                                           const ConjugatePlan& plan, double tol_rel = 1e-3,
                                           const SantaloOptions& options = {});

/// Symmetry defect of f^z about H (z on H), relative to max f^z. f^z is
/// computed on the plan's dual grid moved to z.
double polar_symmetry_defect(const LogConcaveFnGrid& f, const Point& z, const Hyperplane& h,
                             const ConjugatePlan& plan);

/// Copy of `grid` translated so that its middle node sits at `z` on every
/// axis (odd node counts keep the middle exact).
GridSpec centered_at(const GridSpec& grid, const Point& z);

}  // namespace lcf
