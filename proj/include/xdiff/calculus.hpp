#pragma once

#include <span>

#include "xdiff/field.hpp"
#include "xdiff/tensor.hpp"

namespace xdiff {

/// Face-normal difference (f_right - f_left)/dx; wrapped on periodic grids,
/// zero on no-flux walls.
FaceField gradient(const ScalarField& f);

/// Per cell, sum over axes of (F_right - F_left)/dx.
ScalarField divergence(const FaceField& flux);

/// Face-normal component of A g.
///
/// The normal-normal coefficient is the arithmetic mean of the two adjacent
/// cell tensors. For d = 2 the tangential gradient in each adjacent cell is
/// the mean of that cell's two parallel faces, multiplied by the cell's own
/// off-diagonal entry, and the two cell contributions are averaged. With
/// constant A this is the usual four-face average; for variable A it keeps
/// -div(A grad) symmetric.
FaceField apply_tensor(std::span<const TensorValue> cells, const FaceField& g);
FaceField apply_tensor(const TensorField& a, const FaceField& g, double t);

/// Midpoint rule: dx^d * sum of values.
double integrate(const ScalarField& f);

/// dx^d * sum over distinct faces of F*G. Periodic face N is skipped as the
/// duplicate of face 0.
double face_dot(const FaceField& f, const FaceField& g);

}  // namespace xdiff
