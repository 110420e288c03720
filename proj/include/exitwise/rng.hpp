// rng.hpp - deterministic per-shard random streams.
#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cstdint>

namespace exitwise {

/// One reproducible stream of normals and uniforms. A stream is derived from
/// (seed, shard_id) only, so the draws of a shard never depend on which
/// worker runs it.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t shard_id);

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }

private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
    boost::random::uniform_01<double> uniform_;
};

}  // namespace exitwise
