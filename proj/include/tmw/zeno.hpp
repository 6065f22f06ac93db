#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmw/model.hpp"

namespace tmw::zeno {

// n space thimacs "Space0".."Space<n-1>" in a line. Each node has
// Transfer(in), Receive and Transfer(out); no Create or Process.
struct SpaceLattice {
  StaticModel model;
  std::size_t nodes = 0;

  ThimacId node_id(std::size_t i) const { return "Space" + std::to_string(i); }
};

SpaceLattice build_lattice(std::size_t n);

enum class ArrowAction : std::uint8_t { Arrive, Bounce, Settle };

std::string_view to_string(ArrowAction a) noexcept;

struct BounceRecord {
  std::size_t node = 0;
  ArrowAction action = ArrowAction::Arrive;
  std::uint64_t energy_after = 0;
  StageId stage;
  Post post = Post::Boundary;

  bool operator==(const BounceRecord&) const = default;
};

struct BounceTrace {
  std::vector<BounceRecord> records;
  std::size_t settle_node = 0;
  std::uint64_t residual = 0;
  std::size_t bounces = 0;
};

// One JSON object per line: node, action, energy_after, stage.
std::string to_jsonl(const BounceTrace& trace);

// An arrow that bounces off every node's boundary while it still has
// movement energy, and is accepted (settles) once the energy is gone or
// there is nowhere further to go.
class ArrowSim {
 public:
  ArrowSim(const SpaceLattice& lattice, std::uint64_t energy);

  // Records produced by one arrival: {arrive, bounce} or {arrive, settle}.
  std::vector<BounceRecord> step();
  bool settled() const noexcept { return settled_; }
  std::size_t node() const noexcept { return node_; }
  std::uint64_t energy() const noexcept { return energy_; }

 private:
  std::optional<std::size_t> next_node() const;

  const SpaceLattice* lattice_;
  std::size_t node_ = 0;
  std::uint64_t energy_;
  bool settled_ = false;
};

ArrowSim launch(const SpaceLattice& lattice, std::uint64_t energy);
std::vector<BounceRecord> arrow_step(ArrowSim& sim);
BounceTrace run_until_settled(ArrowSim& sim);

// The lattice with the settle node filled in.
std::string render_lattice_dot(const SpaceLattice& lattice, std::optional<std::size_t> settle_node);

}  // namespace tmw::zeno
