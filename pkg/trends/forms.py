from django import forms
from django.core.exceptions import ValidationError

from .features import MODES
from .series import WEEKDAYS

RUN_MODES = (
    ("preis_single", "Single moving-average strategy"),
    ("preis_ensemble", "Ensemble of moving-average strategies"),
    ("learner", "Walk-forward learner"),
)

WEEKDAY_CHOICES = tuple((name, name.capitalize()) for name in WEEKDAYS)


class StringListField(forms.Field):
    """Accepts a YAML list of strings; a single string is read as a one-item list."""

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise ValidationError("Enter a list of strings.", code="invalid")
        items = [str(item).strip() for item in value]
        if any(not item for item in items):
            raise ValidationError("List items cannot be blank.", code="blank_item")
        return items


class IntRangeField(forms.Field):
    """Inclusive integer range given as `[low, high]`."""

    def to_python(self, value):
        if value in self.empty_values:
            return None
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ValidationError("Enter a range as [low, high].", code="invalid")
        try:
            low, high = (int(item) for item in value)
        except (TypeError, ValueError):
            raise ValidationError("Range bounds must be integers.", code="invalid")
        if low < 1 or high < low:
            raise ValidationError("Range must satisfy 1 <= low <= high.", code="invalid_range")
        return low, high


class MappingField(forms.Field):
    """String to string mapping, e.g. asset -> keyword."""

    def to_python(self, value):
        if value in self.empty_values:
            return {}
        if not isinstance(value, dict):
            raise ValidationError("Enter a mapping.", code="invalid")
        return {str(key): str(item) for key, item in value.items()}


class RunConfigForm(forms.Form):
    """
    Validates the top level of a run configuration file.

    Optional fields left out of the file come back as None (or empty) in
    cleaned_data; defaults are applied by load_run_config.
    """

    universe = StringListField()
    target_asset = forms.CharField(required=False)
    price_dir = forms.CharField()
    svi_dir = forms.CharField(required=False)
    keyword_sets = StringListField(required=False)
    keywords = StringListField(required=False)
    asset_keywords = MappingField(required=False)
    mode = forms.ChoiceField(choices=RUN_MODES, required=False)
    feature_mode = StringListField(required=False)
    binary = forms.BooleanField(required=False)
    k = forms.IntegerField(min_value=1, required=False)
    k_range = IntRangeField(required=False)
    cost_bps = forms.FloatField(min_value=0, required=False)
    entry_day = forms.ChoiceField(choices=WEEKDAY_CHOICES, required=False)
    exit_day = forms.ChoiceField(choices=WEEKDAY_CHOICES, required=False)
    lags = forms.IntegerField(min_value=1, required=False)
    median_window = forms.IntegerField(min_value=2, required=False)
    threshold = forms.FloatField(min_value=0, required=False)
    min_overlap = forms.IntegerField(min_value=1, required=False)
    output_dir = forms.CharField(required=False)
    threads = forms.IntegerField(min_value=1, required=False)

    def clean_universe(self):
        universe = self.cleaned_data["universe"]
        if not universe:
            raise ValidationError("The universe needs at least one asset.", code="required")
        if len(set(universe)) != len(universe):
            raise ValidationError("Assets must be unique.", code="duplicate")
        return universe

    def clean_feature_mode(self):
        modes = self.cleaned_data["feature_mode"]
        unknown = [mode for mode in modes if mode not in MODES]
        if unknown:
            raise ValidationError(
                "Unknown feature mode(s): %(modes)s.",
                code="invalid_choice",
                params={"modes": ", ".join(unknown)},
            )
        if len(set(modes)) != len(modes):
            raise ValidationError("Feature modes must be unique.", code="duplicate")
        return modes

    def clean(self):
        cleaned_data = super().clean()
        entry_day = cleaned_data.get("entry_day") or "monday"
        exit_day = cleaned_data.get("exit_day") or "friday"
        if WEEKDAYS[exit_day] < WEEKDAYS[entry_day]:
            self.add_error(
                "exit_day", ValidationError("Exit day precedes entry day.", code="order")
            )
        return cleaned_data


class WalkForwardForm(forms.Form):
    calibration_weeks = forms.IntegerField(min_value=10, required=False)
    retrain_every = forms.IntegerField(min_value=1, required=False)
    ensemble_size = forms.IntegerField(min_value=1, required=False)
    tree_depth = forms.IntegerField(min_value=1, required=False)
    subsample_fraction = forms.FloatField(required=False)
    seed = forms.IntegerField(min_value=0, required=False)
    split_quantiles = forms.IntegerField(min_value=2, required=False)

    def clean_subsample_fraction(self):
        fraction = self.cleaned_data["subsample_fraction"]
        if fraction is not None and not 0 < fraction <= 1:
            raise ValidationError("Enter a fraction in (0, 1].", code="invalid_range")
        return fraction
