#pragma once

#include <Eigen/Core>
#include <functional>

namespace underreport {

// number of worker threads: UNDERREPORT_THREADS if set to a positive
// integer, otherwise the hardware concurrency, never less than 1
int worker_count();

// runs body(i) for i in [0, n); work is handed out dynamically, and results
// must not depend on which thread runs which index.  With one worker the
// bodies run inline on the calling thread.  The first exception thrown by a
// body is rethrown after all workers finish.
void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& body);

}  // namespace underreport
