#pragma once

#include "sublintest/bitstring.hpp"
#include "sublintest/birthday.hpp"
#include "sublintest/decision_list.hpp"
#include "sublintest/distribution.hpp"
#include "sublintest/dl_tester.hpp"
#include "sublintest/errors.hpp"
#include "sublintest/exact.hpp"
#include "sublintest/instances.hpp"
#include "sublintest/io.hpp"
#include "sublintest/mdl_tester.hpp"
#include "sublintest/oracle.hpp"
#include "sublintest/rng.hpp"
#include "sublintest/runner.hpp"
#include "sublintest/stats.hpp"
#include "sublintest/total_tester.hpp"
