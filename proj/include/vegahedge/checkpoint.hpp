#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "vegahedge/ana_opt.hpp"
#include "vegahedge/mlp.hpp"

namespace vegahedge {

// Text format, version 1:
//
//   vegahedge-checkpoint v1
//   config_hash <hex>
//   network actor | critic | target_critic
//   layers <n0> <n1> ...
//   activations <name> ...
//   values <count>
//   <one value per line>
//   optimizer actor | critic
//   t <t> steps <r> eta <eta> beta1 <b1> beta2 <b2> eps <eps>
//   theta_prev <count> / m <count> / v <count>, each followed by its values
//   end
//
// Reals are written with 17 significant digits, so a reload is bit-exact.
struct Checkpoint {
  std::string config_hash;
  distrl::MlpParams actor;
  distrl::MlpParams critic;
  std::optional<distrl::MlpParams> target_critic;
  ana::AnaState actor_opt;
  ana::AnaState critic_opt;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointMagic = "vegahedge-checkpoint";
inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vegahedge
