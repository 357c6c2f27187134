#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ozd {

/// Invalid argument to a sampler or estimator (dimension, count, weight).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid experiment, schedule or objective configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation requested on an optimizer state that does not support it yet.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The black-box objective returned a non-finite value.  Carries the probe.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, Eigen::VectorXd probe)
      : std::runtime_error(what), probe_(std::move(probe)) {}
  const Eigen::VectorXd& probe() const { return probe_; }

 private:
  Eigen::VectorXd probe_;
};

}  // namespace ozd
