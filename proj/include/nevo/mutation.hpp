#pragma once

namespace nevo {

/// Outcome of one structural mutation attempt. applied=false means the
/// mutation's precondition did not hold and the caller should resample.
struct MutationOutcome {
    bool applied = false;
    int node_id = -1; // node created/removed when meaningful
};

} // namespace nevo
