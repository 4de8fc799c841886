#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrc {

enum class ErrorKind {
  Capacity,
  Index,
  Dimension,
  InvalidChannel,
  InvalidLayout,
  InvalidArgument,
  Range,
  Topology,
  Parse,
  CorruptedState,
  Divergence,
  UndefinedNormalization,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; `kind()` distinguishes failure classes
// and `field()` names the offending config/profile field when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

}  // namespace qrc
