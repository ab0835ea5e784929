#ifndef TLI_ERRORS_HPP
#define TLI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tli {

// Input outside the mathematical domain of an operation (e.g. E <= 0).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Caller violated a structural precondition (mismatched grids, no overlap).
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Oscillatory kernel is undersampled on the requested grid.
class SamplingError : public std::runtime_error {
public:
  SamplingError(const std::string &what, double required_dx)
      : std::runtime_error(what), required_dx_(required_dx) {}
  double required_dx() const noexcept { return required_dx_; }

private:
  double required_dx_;
};

// Beamline produced no flux where flux is required.
class MisconfigurationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, int line, const std::string &message)
      : std::runtime_error(format(key, line, message)), key_(std::move(key)),
        line_(line) {}

  const std::string &key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

private:
  static std::string format(const std::string &key, int line,
                            const std::string &message) {
    std::string out = "config";
    if (line > 0)
      out += " line " + std::to_string(line);
    if (!key.empty())
      out += " key '" + key + "'";
    return out + ": " + message;
  }

  std::string key_;
  int line_;
};

} // namespace tli

#endif // TLI_ERRORS_HPP
