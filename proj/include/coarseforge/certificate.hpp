#pragma once

#include "coarseforge/extdist.hpp"
#include "coarseforge/point.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coarseforge {

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct Witness {
    std::vector<Point> points;
    std::map<std::string, ExtDist> data;
};

/**
 * A verdict plus the fitted constants that make it replayable, and a concrete
 * witness on failure. `notes` records protocol facts (seeds, sample counts,
 * window-certified labels) so runs diff cleanly.
 */
struct Certificate {
    std::string check;
    Verdict verdict = Verdict::Inconclusive;
    std::map<std::string, ExtDist> constants;
    std::optional<Witness> witness;
    std::map<std::string, std::string> notes;

    bool passed() const { return verdict == Verdict::Pass; }
    bool failed() const { return verdict == Verdict::Fail; }

    Certificate& set(const std::string& key, const ExtDist& v) {
        constants[key] = v;
        return *this;
    }
    ExtDist at(const std::string& key) const {
        auto it = constants.find(key);
        if (it == constants.end()) return ExtDist::inf();
        return it->second;
    }
    bool has(const std::string& key) const { return constants.count(key) > 0; }
};

inline Certificate make_pass(std::string check) {
    Certificate c;
    c.check = std::move(check);
    c.verdict = Verdict::Pass;
    return c;
}

inline Certificate make_fail(std::string check) {
    Certificate c;
    c.check = std::move(check);
    c.verdict = Verdict::Fail;
    return c;
}

}  // namespace coarseforge
