#pragma once

#include <string>
#include <vector>

#include "shoeprint/graph.hpp"

namespace shoeprint {

// Skip-dense age regressor on the side-by-side pair composition
// [print_h x 2*print_w]. Every block's output is forwarded (pooled and
// 1x1-projected) to all later blocks and to the final merge.
ModelGraph build_shoenet(const ArchConfig& config);

// Same trunk on a single print canvas [print_h x print_w].
ModelGraph build_lr_cnn(const ArchConfig& config);

// Two independent plain-block branches, channel-concatenated after
// merge_after_block, shared trunk from there on.
ModelGraph build_fusion(const ArchConfig& config, int merge_after_block, const std::string& name);

// Twin branches with fully tied trunk weights. After share_level_block each
// branch is recalibrated channel-wise by a gate computed from the opposite
// branch's pooled descriptor (shared bottleneck MLP, sigmoid output,
// train-time Gaussian noise on the descriptor).
ModelGraph build_mirror(const ArchConfig& config, int share_level_block, const std::string& name);

// Skip-dense trunk on one print, softmax-2 gender head. FC widths are
// 512/384/256 divided by fc_scale.
ModelGraph build_gender_net(const ArchConfig& config);

// Names: shoenet, lr, fm-early, fm-in, fm-late, mm-early, mm-mid, mm-late,
// gender.
ModelGraph build_arch(const std::string& name, const ArchConfig& config);

const std::vector<std::string>& known_arch_names();

}  // namespace shoeprint
