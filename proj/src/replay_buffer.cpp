#include <stdexcept>

#include "vegahedge/distrl.hpp"

namespace vegahedge::distrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Experience item) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(item));
    return;
  }
  items_[cursor_] = std::move(item);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
  return items_[(cursor_ + i) % items_.size()];
}

std::vector<Experience> ReplayBuffer::sample(std::size_t batch_size) {
  if (batch_size == 0 || items_.size() < batch_size) {
    throw std::logic_error("ReplayBuffer: not enough experiences to sample a batch");
  }
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<Experience> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(items_[pick(rng_)]);
  return batch;
}

}  // namespace vegahedge::distrl
