#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace scoredens {

//! Counter-based splittable random stream.
//!
//! Each draw hashes (key, counter), so a stream is a pure function of its key
//! and the number of values consumed. Child streams are derived by hashing the
//! parent key with an index or label, never by consuming parent state. This is
//! what makes experiment output independent of the parallel schedule: every
//! task derives its own stream from (seed, tag, task index) up front.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  //! Child stream for task `index`; does not advance this stream.
  RandomStream derive(std::uint64_t index) const;
  //! Child stream for a named substream, e.g. derive("trials").
  RandomStream derive(std::string_view tag) const;

  std::uint64_t next_u64();
  //! Uniform on [0, 1).
  double uniform();
  //! Uniform on [a, b).
  double uniform(double a, double b);
  //! Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index d);
  //! Index in [0, n) from a single draw.
  std::size_t index(std::size_t n);

  std::uint64_t key() const { return key_; }

 private:
  RandomStream(std::uint64_t key, int /*raw*/) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace scoredens
