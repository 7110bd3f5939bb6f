#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace quill {

/// Loss and accuracy after one training epoch, on the training portion and
/// on the held-out portion.
struct EpochTrace {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;

    bool operator==(const EpochTrace&) const = default;
};

/// CSV `epoch,train_loss,train_accuracy,val_loss,val_accuracy`, header row,
/// values at 6 significant digits.
void write_traces_csv(std::ostream& out, const std::vector<EpochTrace>& traces);
std::vector<EpochTrace> read_traces_csv(std::istream& in);

} // namespace quill
