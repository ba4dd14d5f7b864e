#ifndef SPECMKT_ERRORS_HPP
#define SPECMKT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specmkt {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration (bad key, bad value,
/// violated model invariant).
class config_error : public error {
 public:
  using error::error;
};

/// A provider's regional spending exceeds its cash-plus-grant budget.
class budget_error : public error {
 public:
  budget_error(int provider, double spent, double budget)
      : error("provider " + std::to_string(provider + 1) + " spends " +
              std::to_string(spent) + " which exceeds its budget " +
              std::to_string(budget)),
        provider_(provider) {}
  int provider() const noexcept { return provider_; }

 private:
  int provider_;
};

/// Evaluation requested at a point where the model expressions are singular
/// (nonpositive spend under a square root, empty complement population).
class singular_domain_error : public error {
 public:
  using error::error;
};

/// The depressed cubic left the three-real-root regime, or a related
/// numeric-domain condition failed.
class regime_error : public error {
 public:
  using error::error;
};

/// An iterative solve gave up; carries the best residual it reached.
class nonconvergence_error : public error {
 public:
  nonconvergence_error(const std::string& what, double best_residual)
      : error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_ = 0.0;
};

/// File could not be read or written.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace specmkt

#endif  // SPECMKT_ERRORS_HPP
