#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

#include "apsel/agents.hpp"

namespace apsel::testing {

/// Replays fixed coin flips and index picks; throws when the policy asks for
/// more randomness than the script holds.
class ScriptedChoice final : public agents::ChoiceSource {
public:
    std::deque<bool> flips;
    std::deque<std::size_t> picks;
    std::size_t flips_used = 0;
    std::size_t picks_used = 0;

    bool bernoulli(double) override
    {
        if (flips.empty()) {
            throw std::logic_error("script exhausted: unexpected coin flip");
        }
        const bool v = flips.front();
        flips.pop_front();
        ++flips_used;
        return v;
    }

    std::size_t index(std::size_t n) override
    {
        if (picks.empty()) {
            throw std::logic_error("script exhausted: unexpected index pick");
        }
        const auto v = picks.front();
        picks.pop_front();
        ++picks_used;
        if (v >= n) {
            throw std::logic_error("scripted pick out of range");
        }
        return v;
    }

    /// One exploration onto arm `arm`.
    ScriptedChoice& explore(std::size_t arm)
    {
        flips.push_back(true);
        picks.push_back(arm);
        return *this;
    }

    ScriptedChoice& exploit()
    {
        flips.push_back(false);
        return *this;
    }
};

} // namespace apsel::testing
