#pragma once

#include <cstddef>

/// Published full-scale figures. They need the complete upstream dataset, a
/// 70B judge and fine-tuned models, so nothing here is reproduced by the test
/// suite; the constants exist so that fixture-scale reports can be set next to
/// them and so bookkeeping identities can be checked at the original scale.
namespace curev::reference {

inline constexpr std::size_t kDatasetSize = 176613;
inline constexpr std::size_t kBelowThreshold = 5895;
inline constexpr std::size_t kCuratedSize = 170718;
inline constexpr int kRelevanceThreshold = 4;
inline constexpr std::size_t kSanityCheckSamples = 100;
inline constexpr std::size_t kDownstreamSubset = 20000;
inline constexpr double kTrainFraction = 0.75;

// Human vs judge agreement on the sanity-check sample.
inline constexpr double kKappaCivility = 1.0;
inline constexpr double kKappaType = 0.88;
inline constexpr double kKappaNature = 0.82;
inline constexpr double kKappaRelevance = 0.85;
inline constexpr double kKappaConciseness = 0.76;
inline constexpr double kKappaClarity = 0.64;

// Average criterion scores before and after curation.
inline constexpr double kClarityBefore = 6.89;
inline constexpr double kClarityAfter = 8.96;
inline constexpr double kConcisenessBefore = 7.71;
inline constexpr double kConcisenessAfter = 8.05;
inline constexpr double kRelevanceBefore = 8.23;

// Share of comments, in percent.
inline constexpr double kPrescriptiveBefore = 62.60;
inline constexpr double kPrescriptiveAfter = 90.20;
inline constexpr double kCivilBefore = 98.80;
inline constexpr double kCivilAfter = 100.0;

// Downstream tasks, original vs curated training comments.
inline constexpr double kBleuOriginal = 7.71;
inline constexpr double kBleuCurated = 11.26;
inline constexpr double kCodeBleuOriginal = 0.36;
inline constexpr double kCodeBleuCurated = 0.44;
inline constexpr std::size_t kExactMatchOriginal = 408;
inline constexpr std::size_t kExactMatchCurated = 445;

}  // namespace curev::reference
