#pragma once

// Horizontal and vertical calculus on T^kM. Every operator is a central
// difference at `opt.fd_step` along the horizontal lift f_u(t) or along the
// straight line v_i + t z in one slot. Semi-basic fields built from gradients
// (grad_h_field, grad_v_field, generator_function) difference at
// `opt.inner_step()`, so nesting them gives second-order operators.
//
// The auxiliary orthonormal basis at the base point is the Gram-Schmidt of the
// chart frame unless a basis is passed explicitly.

#include "pestov/bundle.hpp"

namespace pestov {

/// <grad^h phi(f), u>.
double derivative_h(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                    const Vec& u, const NumericalOptions& opt = {});
/// <grad^{v,i} phi(f), z>.
double derivative_v(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                    int i, const Vec& z, const NumericalOptions& opt = {});

Vec grad_h(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
           const NumericalOptions& opt = {});
Vec grad_v(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f, int i,
           const NumericalOptions& opt = {});
/// All vertical gradients as the columns of an n x k matrix.
Mat grad_v_all(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
               const NumericalOptions& opt = {});

/// so(k)-projection of a tuple of vertical gradients (columns) at an
/// orthonormal frame: w_i - 1/2 sum_j (<w_i,v_j> + <w_j,v_i>) v_j.
Mat project_so(const ManifoldModel& m, const Frame& f, const Mat& gradients);
Vec grad_v_proj(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f, int i,
                const NumericalOptions& opt = {});
Mat grad_v_proj_all(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                    const NumericalOptions& opt = {});

/// nabla^h_u X(f): transported samples X(f_u(+-h)) pulled back to f.
Vec cov_h(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Vec& u,
          const NumericalOptions& opt = {});
/// <nabla^h_u X(f), w>, with w carried along the lift.
double cov_h_dot(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Vec& u,
                 const Vec& w, const NumericalOptions& opt = {});
/// nabla^{v,i}_z X(f).
Vec cov_v(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i, const Vec& z,
          const NumericalOptions& opt = {});
/// <nabla^{v,i}_z X(f), w>.
double cov_v_dot(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i,
                 const Vec& z, const Vec& w, const NumericalOptions& opt = {});

double div_h(const ManifoldModel& m, const SemiBasicField& x, const Frame& f,
             const NumericalOptions& opt = {});
double div_h(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Mat& basis,
             const NumericalOptions& opt = {});
double div_v(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i,
             const NumericalOptions& opt = {});
double div_v(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i,
             const Mat& basis, const NumericalOptions& opt = {});

/// f -> v_i.
SemiBasicField frame_vector_field(int i);
SemiBasicField grad_h_field(ModelPtr m, ScalarBundleFunction phi, NumericalOptions opt = {});
SemiBasicField grad_v_field(ModelPtr m, ScalarBundleFunction phi, int i,
                            NumericalOptions opt = {});
/// f -> G^i phi(f).
ScalarBundleFunction generator_function(ModelPtr m, ScalarBundleFunction phi, int i,
                                        NumericalOptions opt = {});

/// The same options with the inner step promoted to the outer one.
NumericalOptions inner_options(const NumericalOptions& opt);

}  // namespace pestov
