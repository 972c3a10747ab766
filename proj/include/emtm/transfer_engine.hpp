#pragma once

#include "emtm/medium_model.hpp"
#include "emtm/momentum_core.hpp"

#include <string>
#include <vector>

namespace emtm {

enum class Method { Dyson, SlabExponential, OdeMidpoint };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct PropagationOptions {
    Method method = Method::OdeMidpoint;
    int dyson_order = 4;
    int z_steps = 32;  // per layer
    void validate() const;
};

struct TransferMatrix {
    OperatorF4 op;
    std::vector<std::string> warnings;

    GridPtr grid() const { return op.grid; }
    // Pi_i o M o Pi_j
    OperatorF4 block(int i, int j) const;
};

OperatorF4 assemble_interaction(const Medium& m, double z, GridPtr grid);

TransferMatrix transfer_matrix(const Medium& m, GridPtr grid, const PropagationOptions& opts = {});

// Medium of `second` lies to the right of `first`: returns M_second o M_first.
TransferMatrix compose(const TransferMatrix& first, const TransferMatrix& second);

void save_transfer_matrix(const TransferMatrix& tm, const std::string& path);
TransferMatrix load_transfer_matrix(const std::string& path, GridPtr grid);

}  // namespace emtm
