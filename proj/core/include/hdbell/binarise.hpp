#pragma once

// Binarisation of multi-outcome behaviors and the binarised Bell-test pipeline.

#include <string>
#include <vector>

#include "hdbell/lhv.hpp"
#include "hdbell/seesaw.hpp"

namespace hdbell {

/// Flattened binarised input for multi-outcome input x and outcome a.
inline int binarised_input(int a, int x, int outcomes) { return a + outcomes * x; }

inline constexpr int kClick = 0;
inline constexpr int kNoClick = 1;

/// p_bin(click, click | (a,x), (b,y)) = p(a,b|x,y), with the remaining three
/// entries of each block fixed by the marginals. Throws SignalingInput when the
/// marginals of p depend on the other party's input by more than 1e-6.
Behavior binarise_behavior(const Behavior& p);

/// binarise_behavior of the uniform multi-outcome behavior: white noise on the
/// state seen through click/no-click detection (click probability 1/d).
Behavior binarised_white_noise(const Scenario& multi);

/// Locality options normalizing witnesses against binarised white noise, so
/// that 1 + W is the critical visibility. The noise behavior is filled in by
/// the binarised pipeline when left empty.
LocalityOptions binarised_locality_options();

struct NoiseToleranceOptions {
  double tol_v = 1e-4;
  LocalityOptions locality;
};

/// Critical visibility of binarise(v p_opt + (1 - v) uniform) found by
/// bisection on v in [0, 1] with the locality LP as oracle. Returns 1 when
/// the ideal binarised behavior is already local.
double binarised_noise_tolerance(const Behavior& p_opt, const NoiseToleranceOptions& opt = {});

enum class Family { Cglmp, Satwap };

std::string to_string(Family f);
Family family_from_string(const std::string& s);
BellFunctional family_functional(Family f, int d);
/// Reference optimal model of the family (published presets).
QuantumModel family_reference_model(Family f, int d);

struct WitnessSuiteRow {
  int dimension = 0;
  double value = 0.0;
  SeesawResult result;
};

struct WitnessSuite {
  Family family = Family::Cglmp;
  int d = 0;
  WitnessReport witness;
  double ideal_value = 0.0;
  std::vector<WitnessSuiteRow> rows;
};

/// Witness from the ideal binarised behavior, then see-saw minimization of the
/// witness for each dimension in `dims`.
WitnessSuite binarised_witness_suite(Family family, int d, const std::vector<int>& dims,
                                     const SeesawConfig& cfg,
                                     const LocalityOptions& lopt = binarised_locality_options());

}  // namespace hdbell
