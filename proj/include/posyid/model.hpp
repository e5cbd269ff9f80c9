#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "posyid/basis.hpp"

namespace posyid {

struct MonomialTerm {
  double coefficient = 0.0;
  std::vector<double> exponents;

  bool operator==(const MonomialTerm&) const = default;
};

/// psi(w) = sum_i c_i w^alpha_i with c_i > 0 and distinct alpha_i.
class PosynomialModel {
 public:
  /// Drops zero-coefficient terms; throws IntegrityError on negative or
  /// non-finite coefficients and duplicate exponent vectors, DataError on
  /// exponent vectors of the wrong length.
  PosynomialModel(Index num_variables, std::vector<MonomialTerm> terms);

  Index num_variables() const { return num_variables_; }
  const std::vector<MonomialTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  bool operator==(const PosynomialModel&) const = default;

 private:
  Index num_variables_;
  std::vector<MonomialTerm> terms_;
};

/// Terms {(x_i, alpha_i) : x_i > threshold} in basis order. An entry below
/// -threshold cannot be a posynomial coefficient and raises IntegrityError.
PosynomialModel from_solution(const MonomialBasis& basis, const Eigen::VectorXd& x,
                              double threshold);

double predict(const PosynomialModel& model, std::span<const double> w);
Eigen::VectorXd predict(const PosynomialModel& model, const Dataset& data);

/// ||Phi x - y|| / ||y||.
double relative_error(const DesignMatrix& design, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y);
/// Same, with predictions taken from the model.
double relative_error(const PosynomialModel& model, const Dataset& data);

nlohmann::json to_json(const PosynomialModel& model);
PosynomialModel model_from_json(const nlohmann::json& doc);

std::string serialize(const PosynomialModel& model);
PosynomialModel deserialize(std::string_view text);

void save_model(const PosynomialModel& model, const std::filesystem::path& path);
PosynomialModel load_model(const std::filesystem::path& path);

}  // namespace posyid
