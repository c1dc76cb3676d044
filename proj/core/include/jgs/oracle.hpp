#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jgs/deixis.hpp"
#include "jgs/recognition.hpp"
#include "jgs/scene.hpp"

// Brute-force reference implementations. They share only rasterization with
// the main code paths and are meant for cross-checking, not speed.
namespace jgs::oracle {

/// Direct per-pixel sum of squared differences.
double oracle_nmse(const ForegroundMap& reported, const ForegroundMap& predicted);

struct OraclePrediction {
  std::vector<int> piece_ids;
  ForegroundMap foreground;
};

/// Exhaustive search that accepts a hypothesis only when its mask equals an
/// exemplar mask pixel for pixel, then keeps the one with the strongest
/// summed inverse distance to the gesture footprint centroids (for a single
/// gesture: the smallest distance). Ties go to the earlier subset in
/// size-then-lexicographic order. Throws kEmptyRegion / kNoCandidates like
/// the main pipeline and kInvalidArgument above 16 candidates.
OraclePrediction oracle_predict(const Scene& scene, const GestureSequence& gestures,
                                std::span<const ForegroundMap> exemplar_masks,
                                double softening = 1.0);

/// Student's t CDF by adaptive Simpson integration of the density.
double oracle_t_cdf(double t, double df, double tolerance = 1e-10);

/// True when, over every subset of the gesture's candidate pieces, the trained
/// classifier accepts exactly the subsets whose masks equal an exemplar mask.
bool exemplar_exact(const Scene& scene, const GestureSequence& gestures,
                    std::span<const Exemplar> exemplars, const KnownObjects& known);

/// A seeded scene with one gesture aimed at one of its labeled parts. Draws
/// that are not exemplar-exact are skipped; `screened` counts them.
struct EquivalenceCase {
  Scene scene;
  GestureSequence gestures;
  std::vector<Exemplar> exemplars;
  std::size_t screened = 0;
};
EquivalenceCase equivalence_case(std::uint64_t seed, int max_pieces = 6);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Suites: "nmse", "pipeline", "tcdf", or "all".
std::vector<CheckResult> run_checks(const std::string& suite);

}  // namespace jgs::oracle
