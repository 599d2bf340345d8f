#include "zicure/links.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace zicure {

namespace {

constexpr double kEtaClamp = 700.0;  // keeps exp() inside double range

const char* block_prefix(Block b) {
  switch (b) {
    case Block::kGamma0: return "g0";
    case Block::kGamma1: return "g1";
    case Block::kShape: return "shape";
    case Block::kScale: return "scale";
  }
  return "?";
}

// Linear predictor for one block: intercept + sum beta_j * x[col_j],
// clamped to [-kEtaClamp, kEtaClamp]. `clamped` reports whether the clamp
// was active so the Jacobian can zero the chain rule there.
double linear_predictor(const BlockSpec& spec, const Eigen::VectorXd& beta,
                        const Eigen::VectorXd& covariates, Block b, bool* clamped) {
  if (beta.size() != 1 + static_cast<int>(spec.columns.size())) {
    throw std::invalid_argument(std::string("coefficient block ") + block_prefix(b) +
                                " has length " + std::to_string(beta.size()) +
                                ", design expects " +
                                std::to_string(1 + spec.columns.size()));
  }
  double eta = beta[0];
  for (std::size_t j = 0; j < spec.columns.size(); ++j) {
    const int col = spec.columns[j];
    if (col < 0 || col >= covariates.size()) {
      throw std::invalid_argument(std::string("block ") + block_prefix(b) +
                                  " references covariate column " + std::to_string(col) +
                                  " but the row has " + std::to_string(covariates.size()) +
                                  " entries");
    }
    eta += beta[1 + static_cast<int>(j)] * covariates[col];
  }
  if (clamped != nullptr) *clamped = std::abs(eta) > kEtaClamp;
  return std::clamp(eta, -kEtaClamp, kEtaClamp);
}

}  // namespace

int DesignSpec::block_length(Block b) const {
  const BlockSpec& s = block(b);
  return s.enabled ? 1 + static_cast<int>(s.columns.size()) : 0;
}

int DesignSpec::block_offset(Block b) const {
  int offset = 0;
  for (Block prev : kAllBlocks) {
    if (prev == b) break;
    offset += block_length(prev);
  }
  return offset;
}

int DesignSpec::n_params() const {
  int total = 0;
  for (Block b : kAllBlocks) total += block_length(b);
  return total;
}

void DesignSpec::validate(int n_columns) const {
  for (Block b : kAllBlocks) {
    const BlockSpec& s = block(b);
    if (!s.enabled && !s.columns.empty()) {
      throw std::invalid_argument(std::string("disabled block ") + block_prefix(b) +
                                  " must not list covariate columns");
    }
    std::vector<int> seen;
    for (int col : s.columns) {
      if (col < 0 || col >= n_columns) {
        throw std::invalid_argument(std::string("block ") + block_prefix(b) +
                                    " references covariate column " + std::to_string(col) +
                                    ", valid range is [0, " + std::to_string(n_columns) + ")");
      }
      if (std::find(seen.begin(), seen.end(), col) != seen.end()) {
        throw std::invalid_argument(std::string("block ") + block_prefix(b) +
                                    " lists covariate column " + std::to_string(col) +
                                    " twice");
      }
      seen.push_back(col);
    }
  }
}

std::vector<std::string> DesignSpec::parameter_names(
    const std::vector<std::string>& columns) const {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n_params()));
  for (Block b : kAllBlocks) {
    const BlockSpec& s = block(b);
    if (!s.enabled) continue;
    names.push_back(std::string(block_prefix(b)) + ".intercept");
    for (int col : s.columns) {
      std::string label = col >= 0 && col < static_cast<int>(columns.size())
                              ? columns[static_cast<std::size_t>(col)]
                              : "col" + std::to_string(col);
      names.push_back(std::string(block_prefix(b)) + "." + label);
    }
  }
  return names;
}

DesignSpec DesignSpec::saturated(int n_columns) {
  DesignSpec spec;
  std::vector<int> cols(static_cast<std::size_t>(n_columns));
  for (int j = 0; j < n_columns; ++j) cols[static_cast<std::size_t>(j)] = j;
  for (Block b : kAllBlocks) {
    spec.block(b).enabled = true;
    spec.block(b).columns = cols;
  }
  return spec;
}

Eigen::VectorXd pack(const CoefficientBlock& c, const DesignSpec& spec) {
  Eigen::VectorXd flat(spec.n_params());
  int at = 0;
  for (Block b : kAllBlocks) {
    const int len = spec.block_length(b);
    if (c[b].size() != len) {
      throw std::invalid_argument(std::string("coefficient block ") + block_prefix(b) +
                                  " has length " + std::to_string(c[b].size()) +
                                  ", design expects " + std::to_string(len));
    }
    flat.segment(at, len) = c[b];
    at += len;
  }
  return flat;
}

CoefficientBlock unpack(const Eigen::VectorXd& flat, const DesignSpec& spec) {
  if (flat.size() != spec.n_params()) {
    throw std::invalid_argument("packed coefficient vector has length " +
                                std::to_string(flat.size()) + ", design expects " +
                                std::to_string(spec.n_params()));
  }
  CoefficientBlock c;
  int at = 0;
  for (Block b : kAllBlocks) {
    const int len = spec.block_length(b);
    c[b] = flat.segment(at, len);
    at += len;
  }
  return c;
}

LinkTerms link_predictors(const CoefficientBlock& c, const Eigen::VectorXd& covariates,
                          const DesignSpec& spec) {
  LinkTerms terms;
  if (spec.block(Block::kGamma0).enabled) {
    terms.eta1 = linear_predictor(spec.block(Block::kGamma0), c[Block::kGamma0], covariates,
                                  Block::kGamma0, nullptr);
  }
  if (spec.block(Block::kGamma1).enabled) {
    terms.eta2 = linear_predictor(spec.block(Block::kGamma1), c[Block::kGamma1], covariates,
                                  Block::kGamma1, nullptr);
  }
  if (spec.block(Block::kShape).enabled) {
    terms.eta3 = linear_predictor(spec.block(Block::kShape), c[Block::kShape], covariates,
                                  Block::kShape, nullptr);
  }
  if (spec.block(Block::kScale).enabled) {
    terms.eta4 = linear_predictor(spec.block(Block::kScale), c[Block::kScale], covariates,
                                  Block::kScale, nullptr);
  }
  return terms;
}

SubjectParams link(const CoefficientBlock& c, const Eigen::VectorXd& covariates,
                   const DesignSpec& spec) {
  const LinkTerms terms = link_predictors(c, covariates, spec);
  const bool g0_on = spec.block(Block::kGamma0).enabled;
  const bool g1_on = spec.block(Block::kGamma1).enabled;

  // Softmax over {baseline 0, eta1 (if enabled), eta2 (if enabled)},
  // shifted by the running maximum so the largest exponent is exp(0).
  double shift = 0.0;
  if (g0_on) shift = std::max(shift, terms.eta1);
  if (g1_on) shift = std::max(shift, terms.eta2);
  const double e0 = std::exp(-shift);
  const double e1 = g0_on ? std::exp(terms.eta1 - shift) : 0.0;
  const double e2 = g1_on ? std::exp(terms.eta2 - shift) : 0.0;
  const double denom = e0 + e1 + e2;

  SubjectParams out;
  out.gamma0 = e1 / denom;
  out.gamma1 = e2 / denom;
  out.shape = std::exp(terms.eta3);
  out.scale = std::exp(terms.eta4);
  return out;
}

SubjectParams link(const Eigen::VectorXd& flat, const Eigen::VectorXd& covariates,
                   const DesignSpec& spec) {
  return link(unpack(flat, spec), covariates, spec);
}

Eigen::MatrixXd link_jacobian(const CoefficientBlock& c, const Eigen::VectorXd& covariates,
                              const DesignSpec& spec) {
  const SubjectParams sp = link(c, covariates, spec);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(4, spec.n_params());

  // d eta_b / d beta_b is the design row (1, x_cols); a clamped predictor
  // has zero derivative.
  auto design_row = [&](Block b) {
    const BlockSpec& s = spec.block(b);
    Eigen::VectorXd row(1 + static_cast<int>(s.columns.size()));
    row[0] = 1.0;
    for (std::size_t j = 0; j < s.columns.size(); ++j) {
      row[1 + static_cast<int>(j)] = covariates[s.columns[j]];
    }
    bool clamped = false;
    linear_predictor(s, c[b], covariates, b, &clamped);
    if (clamped) row.setZero();
    return row;
  };

  const bool g0_on = spec.block(Block::kGamma0).enabled;
  const bool g1_on = spec.block(Block::kGamma1).enabled;

  // Multinomial-logit partials: d g0/d eta1 = g0 (1 - g0), d g0/d eta2 =
  // -g0 g1, symmetrically for g1.
  if (g0_on) {
    const Eigen::VectorXd row = design_row(Block::kGamma0);
    const int off = spec.block_offset(Block::kGamma0);
    jac.block(0, off, 1, row.size()) = (sp.gamma0 * (1.0 - sp.gamma0)) * row.transpose();
    jac.block(1, off, 1, row.size()) = (-sp.gamma0 * sp.gamma1) * row.transpose();
  }
  if (g1_on) {
    const Eigen::VectorXd row = design_row(Block::kGamma1);
    const int off = spec.block_offset(Block::kGamma1);
    jac.block(0, off, 1, row.size()) = (-sp.gamma0 * sp.gamma1) * row.transpose();
    jac.block(1, off, 1, row.size()) = (sp.gamma1 * (1.0 - sp.gamma1)) * row.transpose();
  }
  if (spec.block(Block::kShape).enabled) {
    const Eigen::VectorXd row = design_row(Block::kShape);
    const int off = spec.block_offset(Block::kShape);
    jac.block(2, off, 1, row.size()) = sp.shape * row.transpose();
  }
  if (spec.block(Block::kScale).enabled) {
    const Eigen::VectorXd row = design_row(Block::kScale);
    const int off = spec.block_offset(Block::kScale);
    jac.block(3, off, 1, row.size()) = sp.scale * row.transpose();
  }
  return jac;
}

}  // namespace zicure
