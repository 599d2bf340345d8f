#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace zicure {

// The four linked parameter blocks, in packing order.
enum class Block { kGamma0 = 0, kGamma1 = 1, kShape = 2, kScale = 3 };

inline constexpr std::array<Block, 4> kAllBlocks = {
    Block::kGamma0, Block::kGamma1, Block::kShape, Block::kScale};

// Covariate columns feeding one linked parameter. An enabled block always
// carries an implicit leading intercept; a disabled block contributes a zero
// linear predictor, which removes the corresponding mass from the
// multinomial logit (gamma fixed at 0) or pins a Weibull parameter at
// exp(0) = 1. Disabling blocks is how the nested Berkson-Gage, plain
// Weibull, and exponential models are expressed.
struct BlockSpec {
  bool enabled = true;
  std::vector<int> columns;  // indices into the covariate row
};

struct DesignSpec {
  std::array<BlockSpec, 4> blocks;

  const BlockSpec& block(Block b) const { return blocks[static_cast<int>(b)]; }
  BlockSpec& block(Block b) { return blocks[static_cast<int>(b)]; }

  // Number of packed coefficients in one block: 0 if disabled, else
  // 1 (intercept) + number of columns.
  int block_length(Block b) const;

  // Offset of a block inside the packed coefficient vector.
  int block_offset(Block b) const;

  // Total packed length across the four blocks.
  int n_params() const;

  // Throws std::invalid_argument when a column index falls outside
  // [0, n_columns) or is duplicated within a block.
  void validate(int n_columns) const;

  // Human-readable packed-parameter names, e.g. "g0.intercept", "g1.x",
  // "shape.intercept", "scale.x". `columns` names the covariate row.
  std::vector<std::string> parameter_names(const std::vector<std::string>& columns) const;

  // All four blocks enabled with the same covariate columns 0..k-1.
  static DesignSpec saturated(int n_columns);
};

// Per-block coefficient vectors (intercept first). Disabled blocks hold
// empty vectors.
struct CoefficientBlock {
  std::array<Eigen::VectorXd, 4> beta;

  Eigen::VectorXd& operator[](Block b) { return beta[static_cast<int>(b)]; }
  const Eigen::VectorXd& operator[](Block b) const { return beta[static_cast<int>(b)]; }
};

// Linked parameters for one covariate row.
struct SubjectParams {
  double gamma0;
  double gamma1;
  double shape;
  double scale;
};

// Flatten block coefficients in packing order beta1, beta2, beta3, beta4.
Eigen::VectorXd pack(const CoefficientBlock& c, const DesignSpec& spec);

// Inverse of pack; throws std::invalid_argument on length mismatch.
CoefficientBlock unpack(const Eigen::VectorXd& flat, const DesignSpec& spec);

// Clamped linear predictors for one covariate row; disabled blocks report
// 0. The likelihood works from these directly so it can form log(gamma0),
// log(gamma1) and log(1 - gamma0 - gamma1) without round-tripping through
// the probabilities.
struct LinkTerms {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
};

LinkTerms link_predictors(const CoefficientBlock& c, const Eigen::VectorXd& covariates,
                          const DesignSpec& spec);

// Apply the links at one covariate row:
//   gamma0 = e^{eta1} / (1 + e^{eta1} + e^{eta2})
//   gamma1 = e^{eta2} / (1 + e^{eta1} + e^{eta2})
//   shape  = e^{eta3},  scale = e^{eta4}
// with each linear predictor clamped to [-700, 700] before
// exponentiation. Disabled gamma blocks drop their term from the logit
// entirely (mass exactly 0); disabled Weibull blocks yield exp(0) = 1.
SubjectParams link(const CoefficientBlock& c, const Eigen::VectorXd& covariates,
                   const DesignSpec& spec);

// Convenience overload on the packed vector.
SubjectParams link(const Eigen::VectorXd& flat, const Eigen::VectorXd& covariates,
                   const DesignSpec& spec);

// Analytic Jacobian d(gamma0, gamma1, shape, scale) / d(packed
// coefficients), one row per linked parameter (4 x n_params). Used by
// delta-method consumers and validated against finite differences in tests.
Eigen::MatrixXd link_jacobian(const CoefficientBlock& c, const Eigen::VectorXd& covariates,
                              const DesignSpec& spec);

}  // namespace zicure
