#ifndef SCIDETECT_DEMO_CORPUS_H_
#define SCIDETECT_DEMO_CORPUS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scidetect/corpus.h"

namespace scidetect {

// Machine "profiles" of the synthetic corpus. Each perturbs the human
// template generator with a fixed statistical signature:
//   profile_a  terse: short sentences from a small core vocabulary (low
//              lexical diversity, simple words, no asides).
//   profile_b  verbose: long chained sentences with rare polysyllabic
//              vocabulary, colon lists, quoted coinages, and a stock trigram
//              repeated in every text.
//   profile_c  drifting: human-length sentences that wander off the title
//              topic and between sentences, joined with em-dashes.
//   profile_d  hedged: adverb-laden sentences with parenthetical asides and
//              exclamations.
inline constexpr int kMaxDemoProfiles = 4;

std::vector<std::string> demo_profile_sources(int profile_count);

// For each profile p and pair k < per_profile, emits a human excerpt and a
// machine excerpt sharing one title (ids "human-<p>-<kkk>" and
// "<source>-<kkk>"). Both records carry the extra field "dataset" naming the
// profile so paired datasets can be recovered. Throws DomainError unless
// 2 <= profile_count <= kMaxDemoProfiles and per_profile >= 10.
Corpus synthesize_demo_corpus(int profile_count, int per_profile,
                              std::uint64_t seed);

}  // namespace scidetect

#endif  // SCIDETECT_DEMO_CORPUS_H_
