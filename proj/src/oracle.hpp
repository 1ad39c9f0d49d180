#pragma once

// Reference computations for verification. Nothing here calls the factored
// matvecs or the structured SDP operators: kernels are densified from their
// factors and every SDP matrix is written out entry by entry.

#include "crf_model.hpp"

#include <vector>

namespace lrsdcut::oracle {

/// sum_m w_m K_m as a dense N x N matrix.
Mat dense_kernel(const CrfProblem& problem);

/// sum_i psi_i(x_i) + sum_{i<j} K_ij mu(x_i, x_j), by double loop.
double dense_energy(const CrfProblem& problem, const Mat& k, const Labeling& x);

struct MapResult {
  Labeling labels;
  double energy = 0.0;
  std::uint64_t enumerated = 0;
};

inline constexpr double kMaxEnumeration = 1e6;

/// Exhaustive odometer enumeration; ties go to the lexicographically
/// smallest labeling. Throws TooLarge when L^N > 1e6.
MapResult brute_force_map(const CrfProblem& problem);
/// Second, recursive enumerator with incremental energies.
MapResult brute_force_map_recursive(const CrfProblem& problem);

/// The SDP relaxation with every matrix dense.
struct DenseSdp {
  Mat a;                   // unshifted
  std::vector<Mat> b_mats;
  Vec b;
  double eta = 0.0;
};

inline constexpr Index kMaxDenseDim = 200;

/// Potts: labels first, then variables. General mu: index i * L + l.
DenseSdp dense_sdp(const CrfProblem& problem);

struct DenseSdpPieces {
  Mat c;       // -(A - nu I) - sum u_i B_i
  Mat c_plus;  // PSD part of c
  double dual = 0.0;
  Vec gradient;
  Vec eigenvalues;  // of c, ascending
};

DenseSdpPieces dense_sdp_pieces(const DenseSdp& sdp, const Vec& u, double gamma, double nu = 0.0);

/// PSD part by full eigendecomposition.
Mat dense_psd_part(const Mat& symmetric);

/// Lifted PSD matrix of a labeling: [I; X][I; X]^T (Potts) or y y^T (general).
Mat lifted_matrix(const CrfProblem& problem, const Labeling& x);

}  // namespace lrsdcut::oracle
