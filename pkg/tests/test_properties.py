"""Randomized invariant checks with fixed seeds (implementations in conftest)."""

from conftest import (
    check_ad_matches_finite_differences,
    check_affine_exactness,
    check_root_fixed_point,
    check_scale_invariance,
    check_translation_covariance,
    check_weighted_identity,
)


def test_weighted_form_identity():
    assert check_weighted_identity() >= 100


def test_scale_invariance():
    assert check_scale_invariance() >= 100


def test_translation_covariance():
    assert check_translation_covariance() >= 100


def test_affine_one_step_exactness():
    assert check_affine_exactness() >= 100


def test_root_fixed_point():
    assert check_root_fixed_point() >= 100


def test_ad_agrees_with_finite_differences():
    assert check_ad_matches_finite_differences() >= 100
