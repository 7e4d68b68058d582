// Convenience umbrella for the whole library.

#pragma once

#include "twinfock/analysis.hpp"
#include "twinfock/dense.hpp"
#include "twinfock/dynamics.hpp"
#include "twinfock/fock.hpp"
#include "twinfock/harness.hpp"
#include "twinfock/io.hpp"
#include "twinfock/measurement.hpp"
#include "twinfock/version.hpp"
