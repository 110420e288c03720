#include "exitwise/rng.hpp"

#include <boost/random/seed_seq.hpp>

namespace exitwise {

Stream::Stream(std::uint64_t seed, std::uint64_t shard_id)
{
    boost::random::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                static_cast<std::uint32_t>(shard_id), static_cast<std::uint32_t>(shard_id >> 32),
                                0x65786974u};
    engine_.seed(seq);
}

}  // namespace exitwise
