#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdmp {

/// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration. `path` names the offending field when known.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg, std::string path = {})
      : Error(path.empty() ? msg : path + ": " + msg), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A channel produced a rate above the majorant it advertised.
class ChannelBoundViolated : public Error {
 public:
  ChannelBoundViolated(std::size_t channel, double rate, double bound)
      : Error("channel " + std::to_string(channel) + " rate " + std::to_string(rate) + " exceeds bound " +
              std::to_string(bound)),
        channel_(channel), rate_(rate), bound_(bound) {}
  std::size_t channel() const noexcept { return channel_; }
  double rate() const noexcept { return rate_; }
  double bound() const noexcept { return bound_; }

 private:
  std::size_t channel_;
  double rate_;
  double bound_;
};

/// More events than max_events before reaching t_end.
class ExplosionSuspected : public Error {
 public:
  ExplosionSuspected(std::size_t events, double t_reached)
      : Error("explosion guard: " + std::to_string(events) + " events before t=" + std::to_string(t_reached)),
        events_(events), t_reached_(t_reached) {}
  std::size_t events() const noexcept { return events_; }
  double t_reached() const noexcept { return t_reached_; }

 private:
  std::size_t events_;
  double t_reached_;
};

/// Reflection direction vanishes (critical point of the potential).
class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

class InsufficientLength : public Error {
 public:
  using Error::Error;
};

class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

class NonPositiveCovariance : public Error {
 public:
  using Error::Error;
};

/// Input that makes an estimator meaningless (e.g. a constant functional).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace pdmp
