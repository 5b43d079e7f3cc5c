#pragma once

#include <cstdint>

#include "abrsim/sim_time.hpp"

namespace abrsim {

enum class CellKind : std::uint8_t {
    Data,
    Frm,  // forward RM cell (source -> destination)
    Brm,  // backward RM cell (destination -> source)
};

// One ATM cell. RM fields are meaningful only for Frm/Brm cells.
struct Cell {
    std::int32_t vc = -1;
    CellKind kind = CellKind::Data;
    double ccr_cps = 0.0;  // source's claimed rate, stamped at FRM emission
    double er_cps = 0.0;   // explicit rate; switches only ever lower it
    bool ni = false;
    std::int64_t rm_id = -1;  // unique per RM cell; lets audits follow one
                              // cell through every ER stamp on its path

    bool is_rm() const { return kind != CellKind::Data; }
    bool is_forward() const { return kind != CellKind::Brm; }
};

// Anything that can accept a delivered cell (hosts, switches).
class CellSink {
  public:
    virtual ~CellSink() = default;
    virtual void deliver(const Cell& cell, SimTime now) = 0;
};

}  // namespace abrsim
