#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace maryland {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegionTooLarge : public Error {
 public:
  RegionTooLarge(long long requested, long long cap)
      : Error("region holds " + std::to_string(requested) + " modes, cap is " + std::to_string(cap)),
        requested(requested), cap(cap) {}
  long long requested;
  long long cap;
};

/// Raised when θ + j·α lies within the configured tolerance of a pole of cot π(·).
class SingularPhase : public Error {
 public:
  SingularPhase(Eigen::VectorXi site, double distance)
      : Error("phase at site is within " + std::to_string(distance) + " of the cotangent pole"),
        site(std::move(site)), distance(distance) {}
  Eigen::VectorXi site;
  double distance;
};

class MatchingIncomplete : public Error {
 public:
  explicit MatchingIncomplete(int unmatched)
      : Error(std::to_string(unmatched) + " sites left without an eigenvector"), unmatched(unmatched) {}
  int unmatched;
};

class AsymmetricBox : public Error {
 public:
  using Error::Error;
};

class PoleOnGrid : public Error {
 public:
  PoleOnGrid(double theta, int site_slot)
      : Error("grid point " + std::to_string(theta) + " hits a pole of shifted cot"),
        theta(theta), site_slot(site_slot) {}
  double theta;
  int site_slot;
};

class BlockTooSmall : public Error {
 public:
  BlockTooSmall(int needed, int available)
      : Error("target block time radius " + std::to_string(available) + " cannot hold convolution radius " +
              std::to_string(needed)),
        needed(needed), available(available) {}
  int needed;
  int available;
};

class IllConditioned : public Error {
 public:
  explicit IllConditioned(double cond)
      : Error("linearized operator condition number " + std::to_string(cond) + " above limit"), cond(cond) {}
  double cond;
};

class NoProgress : public Error {
 public:
  NoProgress(double before, double after)
      : Error("Newton residual did not decrease: " + std::to_string(before) + " -> " + std::to_string(after)),
        before(before), after(after) {}
  double before;
  double after;
};

class DidNotConverge : public Error {
 public:
  DidNotConverge(std::string why, std::vector<double> history)
      : Error("solver did not converge: " + why), history(std::move(history)) {}
  std::vector<double> history;
};

class SingularRestriction : public Error {
 public:
  using Error::Error;
};

class HypothesisViolated : public Error {
 public:
  explicit HypothesisViolated(std::vector<std::string> failed)
      : Error("hypotheses violated: " + join(failed)), failed(std::move(failed)) {}
  std::vector<std::string> failed;

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
  }
};

class CoverageGap : public Error {
 public:
  explicit CoverageGap(Eigen::VectorXi site) : Error("site not covered by a good sub-box"), site(std::move(site)) {}
  Eigen::VectorXi site;
};

}  // namespace maryland
