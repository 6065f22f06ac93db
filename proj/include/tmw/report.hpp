#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace tmw {

enum class Severity { Error, Warning };

inline std::string_view to_string(Severity s) noexcept {
  return s == Severity::Error ? "error" : "warning";
}

struct Finding {
  Severity severity = Severity::Error;
  std::string code;     // e.g. "UnresolvedEndpoint", "ControlImposed"
  std::string subject;  // id of the offending stage/edge/event
  std::string message;

  bool operator==(const Finding&) const = default;
};

// Findings are data, not failures. An empty report means a valid input.
struct Report {
  std::vector<Finding> findings;

  bool empty() const noexcept { return findings.empty(); }

  std::size_t error_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        findings.begin(), findings.end(),
        [](const Finding& f) { return f.severity == Severity::Error; }));
  }
  std::size_t warning_count() const noexcept {
    return findings.size() - error_count();
  }
  bool has_errors() const noexcept { return error_count() > 0; }

  std::size_t count(std::string_view code) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(),
                      [&](const Finding& f) { return f.code == code; }));
  }

  bool operator==(const Report&) const = default;
};

}  // namespace tmw
