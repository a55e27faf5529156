#pragma once

// Fourier analysis at the standard representation sigma, done entirely with
// n x n permutation-matrix coefficients. The permutation representation splits
// as trivial + sigma, so every sigma quantity is the permutation-matrix
// quantity with the trivial block (the mean) subtracted. No basis of the
// mean-zero subspace is ever chosen.

#include <vector>

#include "permix/group.hpp"
#include "permix/rational.hpp"

namespace permix {

/// coeff(w, i) = integral of f(pi) 1[pi(i) = w], i.e. the measure-weighted
/// permutation-matrix coefficient. Every row and column sums to the mean.
struct SigmaCoefficient {
  int n = 0;
  std::vector<double> coeff;  // row-major, coeff[w * n + i]
  double mean = 0.0;

  double at(int w, int i) const { return coeff[static_cast<std::size_t>(w * n + i)]; }
};

SigmaCoefficient sigma_coefficient(const GroupFunction& f);

/// Coefficient of f*g: the matrix product of the coefficients.
SigmaCoefficient coefficient_product(const SigmaCoefficient& a, const SigmaCoefficient& b);

/// <f^(sigma), g^(sigma)>_HS = <A, B>_HS - mean(A) mean(B).
double sigma_hs_product(const SigmaCoefficient& a, const SigmaCoefficient& b);

struct DecompositionReport {
  double main_term = 0.0;   // alpha beta gamma
  double sigma_term = 0.0;  // (n-1) <f^ g^, h^>_HS at sigma
  double remainder = 0.0;   // everything from the other irreducibles, by subtraction
  double total = 0.0;       // <f*g, h> by direct convolution
};

DecompositionReport decompose_triple(const GroupFunction& f, const GroupFunction& g,
                                     const GroupFunction& h);

/// Exact version of decompose_triple for indicator inputs.
struct ExactDecomposition {
  Rational main_term;
  Rational sigma_term;
  Rational remainder;
  Rational total;
};

ExactDecomposition decompose_triple_exact(const GroupSubset& x, const GroupSubset& y,
                                          const GroupSubset& z);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = (n-1) <f^ g^, h^>_HS at sigma (matrix route);
/// rhs = ((n-1)/n) sum_i <f * p_i g, p_i h> (pushforward route).
/// Requires one of the three integrals to vanish; throws DomainError otherwise.
IdentitySides secondterm_identity_check(const GroupFunction& f, const GroupFunction& g,
                                        const GroupFunction& h);

struct ParsevalRemnant {
  double norm_squared = 0.0;         // ||f||_2^2
  double sigma_energy = 0.0;         // (n-1) ||f^(sigma)||_HS^2
  double pushforward_energy = 0.0;   // ((n-1)/n) sum_i ||p_i f||_2^2 (valid for mean-zero f)
};

ParsevalRemnant parseval_remnant(const GroupFunction& f);

/// Character of sigma: fix(pi) - 1.
double standard_character(const Permutation& p);

/// Minimal dimension of a nontrivial irreducible representation, for A_n only
/// (A_3, A_4 -> 1, A_5 -> 3, A_6 -> 5, A_n -> n-1 for n >= 7).
/// Throws DomainError for S_n and for trivial groups; pass m explicitly there.
int minimal_dimension(const GroupSpace& space);
int minimal_dimension(int n, Parity parity);

}  // namespace permix
