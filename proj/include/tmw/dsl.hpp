#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tmw/model.hpp"

namespace tmw {

struct SourceSpan {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based, counted in code points

  auto operator<=>(const SourceSpan&) const = default;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;  // "Syntax", "DuplicateStageKind", "IllegalFlow", ...
  std::string message;
  SourceSpan span;

  bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& d);

// Syntax problems make a file unusable; the rest are model findings.
bool is_syntax_diagnostic(const Diagnostic& d);

struct ParseResult {
  StaticModel model;
  std::vector<Diagnostic> diagnostics;  // ordered by span

  bool ok() const noexcept {
    for (const auto& d : diagnostics) {
      if (d.severity == Severity::Error) return false;
    }
    return true;
  }
};

// Parses .tm source. Never throws on bad input; everything surfaces as
// diagnostics and the model holds whatever could be built.
//
//   model "Order handling";            # optional label
//   thimac Order {
//     create; process; release; transfer;   # transfer = both ports
//     thimac Form { receive; transfer in; }
//     flow create -> process -> release;    # scoped to Order
//   }
//   flow Order.transfer -> Order.Form.transfer;
//   trigger Order.process -> Billing.create;
ParseResult parse_model(std::string_view text, std::string_view file = "<input>");

// Prints a model back to .tm source using fully qualified stage ids.
std::string print_model(const StaticModel& model);

}  // namespace tmw
