#pragma once

#include "capbp/engine.hpp"
#include "capbp/scenario.hpp"

namespace capbp {

/// Middle junction with phases p_ab and p_cd where the linear controller
/// picks the blocked movement: Q_b = C_b = 50, Q_a = 60, Q_c = 10 < Q_d = 20.
/// b and d drain into a full node x that in turn only feeds b, so nothing
/// downstream moves either. No arrivals; one slot.
Scenario fixture_theorem1();

/// Three junctions whose ring nodes n_i are full (40 queued toward n_i+1,
/// 10 toward the sink s_i) while the external queues e_i -> n_i+1 hold 120.
/// Under linear pressures every junction keeps choosing the blocked
/// external movement. A reconstruction of the mechanism, not of an exact
/// published layout.
Scenario fixture_deadlock_ring();

/// 4x4 grid with alternating one/two-lane roads of 150 m, heavier demand on
/// the northern entries and a triangular peak over 720 slots (3 hours).
ScenarioDocument grid4x4_peak_document();
Scenario fixture_grid4x4_peak();

} // namespace capbp
