#include "fallrec/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace fallrec {

namespace {

constexpr char kMagic[4] = {'F', 'R', 'C', 'P'};

template <typename T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw CheckpointError("truncated checkpoint");
  return value;
}

void write_sizes(std::ostream& os, const std::vector<int>& sizes) {
  write_pod<uint32_t>(os, static_cast<uint32_t>(sizes.size()));
  for (int s : sizes) write_pod<uint32_t>(os, static_cast<uint32_t>(s));
}

std::vector<int> read_sizes(std::istream& is) {
  const uint32_t n = read_pod<uint32_t>(is);
  if (n > 64) throw CheckpointError("implausible layer count");
  std::vector<int> sizes(n);
  for (auto& s : sizes) s = static_cast<int>(read_pod<uint32_t>(is));
  return sizes;
}

void write_array(std::ostream& os, const VecX& v) {
  write_pod<uint64_t>(os, static_cast<uint64_t>(v.size()));
  for (int i = 0; i < v.size(); ++i)
    write_pod<float>(os, static_cast<float>(v(i)));
}

VecX read_array(std::istream& is) {
  const uint64_t n = read_pod<uint64_t>(is);
  if (n > (1ull << 32)) throw CheckpointError("implausible array size");
  VecX v(static_cast<int>(n));
  for (uint64_t i = 0; i < n; ++i)
    v(static_cast<int>(i)) = static_cast<double>(read_pod<float>(is));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open for write: " + path);
  os.write(kMagic, 4);
  write_pod<uint32_t>(os, Checkpoint::kVersion);
  write_pod<uint64_t>(os, ckpt.config_hash);
  write_pod<uint64_t>(os, ckpt.iteration);
  for (uint64_t w : ckpt.rng_state) write_pod<uint64_t>(os, w);
  write_pod<int64_t>(os, ckpt.adam_t);
  write_sizes(os, ckpt.actor_sizes);
  write_sizes(os, ckpt.critic_sizes);
  write_array(os, ckpt.actor_params);
  write_array(os, ckpt.critic_params);
  write_array(os, ckpt.actor_m);
  write_array(os, ckpt.actor_v);
  write_array(os, ckpt.critic_m);
  write_array(os, ckpt.critic_v);
  if (!os) throw CheckpointError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path, uint64_t expected_hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("corrupt checkpoint (bad magic): " + path);
  const uint32_t version = read_pod<uint32_t>(is);
  if (version != Checkpoint::kVersion)
    throw CheckpointError("unsupported checkpoint version");
  Checkpoint ckpt;
  ckpt.config_hash = read_pod<uint64_t>(is);
  if (expected_hash != 0 && ckpt.config_hash != expected_hash)
    throw CheckpointError("config hash mismatch: checkpoint was written for a different configuration");
  ckpt.iteration = read_pod<uint64_t>(is);
  for (auto& w : ckpt.rng_state) w = read_pod<uint64_t>(is);
  ckpt.adam_t = read_pod<int64_t>(is);
  ckpt.actor_sizes = read_sizes(is);
  ckpt.critic_sizes = read_sizes(is);
  ckpt.actor_params = read_array(is);
  ckpt.critic_params = read_array(is);
  ckpt.actor_m = read_array(is);
  ckpt.actor_v = read_array(is);
  ckpt.critic_m = read_array(is);
  ckpt.critic_v = read_array(is);
  return ckpt;
}

Checkpoint checkpoint_from_learner(const PpoLearner& learner,
                                   uint64_t config_hash, uint64_t iteration,
                                   const Rng& env_rng) {
  Checkpoint c;
  c.config_hash = config_hash;
  c.iteration = iteration;
  env_rng.state(c.rng_state);
  c.actor_sizes = learner.policy().actor.layer_sizes();
  c.critic_sizes = learner.policy().critic.layer_sizes();
  c.actor_params = learner.actor_params();
  c.critic_params = learner.critic_params();
  c.actor_m = learner.actor_opt().m();
  c.actor_v = learner.actor_opt().v();
  c.critic_m = learner.critic_opt().m();
  c.critic_v = learner.critic_opt().v();
  c.adam_t = learner.actor_opt().t();
  return c;
}

void restore_learner(const Checkpoint& ckpt, PpoLearner* learner,
                     Rng* env_rng) {
  if (ckpt.actor_sizes != learner->policy().actor.layer_sizes() ||
      ckpt.critic_sizes != learner->policy().critic.layer_sizes())
    throw CheckpointError("checkpoint layer shapes do not match configuration");
  learner->set_actor_params(ckpt.actor_params);
  learner->set_critic_params(ckpt.critic_params);
  learner->actor_opt().restore(ckpt.actor_m, ckpt.actor_v, ckpt.adam_t);
  learner->critic_opt().restore(ckpt.critic_m, ckpt.critic_v, ckpt.adam_t);
  if (env_rng) env_rng->set_state(ckpt.rng_state);
}

}  // namespace fallrec
