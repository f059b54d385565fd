#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

// Integer feasibility pieces used by the fixture generator.
namespace labelvar::ingest::solver {

// A block of interchangeable rows; x rows of it will be chosen. The block
// contributes x to every listed constraint.
struct CellGroup {
  std::size_t size = 0;
  std::vector<std::size_t> constraints;
};

// Finds x_i in [0, size_i] with, for every constraint c, the sum of x_i over
// the groups listing c equal to targets[c]. Depth-first with interval pruning;
// gives up (nullopt) after node_limit search nodes.
std::optional<std::vector<std::size_t>> solve_cell_counts(std::span<const CellGroup> cells,
                                                          std::span<const std::size_t> targets,
                                                          std::size_t node_limit = 2'000'000);

// `size` rows that each carry exactly k positive labels.
struct LabelGroup {
  int k = 0;
  std::size_t size = 0;
};

// Splits each group's k*size positive labels over annotators (at most `size`
// per annotator per group, so each row gets k distinct annotators). Annotators
// with a demand receive exactly that many labels in total; the rest share the
// remainder as evenly as possible. Result is [group][annotator].
std::optional<std::vector<std::vector<std::size_t>>> distribute_labels(
    std::span<const LabelGroup> groups, std::span<const std::optional<std::size_t>> demands);

struct AnnotatorCandidate {
  std::size_t true_positives = 0;
  // Rows where the annotator's label is present.
  std::size_t evaluated = 0;
};

// Confusion counts against a fixed model that land within `tolerance` of the
// requested accuracy and F1, given the annotator's positive count, the number
// of model positives, the row count, and how many rows may lose the
// annotator's label (only model-negative, annotator-negative rows can). One
// candidate per true-positive count, with the fewest missing labels, ordered by
// total deviation.
std::vector<AnnotatorCandidate> annotator_candidates(double accuracy, double f1, double tolerance,
                                                     std::size_t positive_count, std::size_t model_positives,
                                                     std::size_t rows, std::size_t max_missing);

}  // namespace labelvar::ingest::solver
