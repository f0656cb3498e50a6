#pragma once

// Seeded test-function corpus. Every member is built from the model's feature
// map X = embed(p) and the ambient images V_i = tangent_map(p) v_i, so it is
// independent of the chart used to represent a frame. Names carry the family
// and the seed.

#include "pestov/bundle.hpp"

#include <cstdint>
#include <vector>

namespace pestov {

enum class CorpusFamily {
  kTrigPoly,  // trig base x polynomial fiber
  kTrigBump,  // trig base x Gaussian-bump fiber
  kMixed,     // product of both fiber types
};

ScalarBundleFunction corpus_function(ModelPtr m, CorpusFamily family, std::uint64_t seed);

/// One member per family, seeds derived from `seed`.
std::vector<ScalarBundleFunction> function_corpus(ModelPtr m, std::uint64_t seed);

/// Semi-basic fields mixing tangential projections of ambient vectors with
/// frame-component fields weighted by corpus scalars.
std::vector<SemiBasicField> semibasic_corpus(ModelPtr m, std::uint64_t seed);

/// Functions of the chart components of the frame only. On flat tori these
/// are invariant under every frame flow.
std::vector<ScalarBundleFunction> fiber_only_corpus(int n, std::uint64_t seed);

ScalarBundleFunction constant_function(double c);

/// Tangential projection g^{-1} J^T a of an ambient vector to T_pM.
Vec project_ambient(const ManifoldModel& m, const Point& p, const AmbientVec& a);

}  // namespace pestov
