#pragma once

#include "pdcvis/closed_form.hpp"
#include "pdcvis/detection.hpp"
#include "pdcvis/errors.hpp"
#include "pdcvis/fock.hpp"
#include "pdcvis/optics.hpp"
#include "pdcvis/scheme.hpp"
#include "pdcvis/source.hpp"
#include "pdcvis/sweep.hpp"
#include "pdcvis/validation.hpp"
