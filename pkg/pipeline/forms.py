"""
Forms for run configuration.
"""

from django import forms
from django.core.validators import MinValueValidator, MaxValueValidator


class ChannelListField(forms.CharField):
    """Comma-separated positive channel widths, e.g. ``16,32,64``."""

    def to_python(self, value):
        if isinstance(value, (list, tuple)):
            value = ','.join(str(item) for item in value)
        value = super().to_python(value)
        if not value:
            return ()
        try:
            widths = tuple(int(part) for part in value.split(','))
        except ValueError:
            raise forms.ValidationError('Enter comma-separated integers.', code='invalid')
        if any(width < 1 for width in widths):
            raise forms.ValidationError('Channel widths must be positive.', code='min_value')
        return widths


class RunConfigForm(forms.Form):
    """Validates a merged run configuration (defaults, then file, then flags)."""

    tile_size = forms.IntegerField(validators=[MinValueValidator(2)])
    margin = forms.IntegerField(required=False, validators=[MinValueValidator(0)])
    sigma = forms.FloatField(validators=[MinValueValidator(1e-6)])
    K = forms.IntegerField(validators=[MinValueValidator(1)])
    depth = forms.IntegerField(validators=[MinValueValidator(1), MaxValueValidator(8)])
    base_channels = ChannelListField()
    cardinality = forms.IntegerField(validators=[MinValueValidator(1)])
    bottleneck = forms.IntegerField(validators=[MinValueValidator(1)])
    unit_channels = forms.IntegerField(validators=[MinValueValidator(1)])
    num_classes = forms.IntegerField(validators=[MinValueValidator(2)])
    dsm_scale = forms.FloatField(validators=[MinValueValidator(1e-6)])
    epochs = forms.IntegerField(validators=[MinValueValidator(1)])
    batch_size = forms.IntegerField(validators=[MinValueValidator(1)])
    passes = forms.IntegerField(validators=[MinValueValidator(1)])
    learning_rate = forms.FloatField(validators=[MinValueValidator(1e-12)])
    momentum = forms.FloatField(validators=[MinValueValidator(0.0), MaxValueValidator(0.999999)])
    seed = forms.IntegerField(validators=[MinValueValidator(0)])
    workers = forms.IntegerField(validators=[MinValueValidator(0)])
    rotate_augment = forms.BooleanField(required=False)
    train_scenes = forms.IntegerField(validators=[MinValueValidator(1)])
    train_tiles = forms.IntegerField(validators=[MinValueValidator(1)])
    val_scenes = forms.IntegerField(validators=[MinValueValidator(1)])
    scene_size = forms.IntegerField(validators=[MinValueValidator(1)])

    def clean(self):
        cleaned_data = super().clean()
        tile = cleaned_data.get('tile_size')
        depth = cleaned_data.get('depth')
        margin = cleaned_data.get('margin')

        if tile and margin is None:
            margin = cleaned_data['margin'] = tile // 8
        if tile and margin is not None and 2 * margin >= tile:
            self.add_error('margin', f'Margin {margin} leaves no tile core for tile side {tile}.')
        if tile and depth and tile % 2 ** depth:
            self.add_error('tile_size', f'Tile side must be divisible by 2^depth = {2 ** depth}.')

        base = cleaned_data.get('base_channels')
        if base is not None and depth and len(base) != depth:
            self.add_error('base_channels', f'Need {depth} widths for depth {depth}, got {len(base)}.')

        bottleneck = cleaned_data.get('bottleneck')
        cardinality = cleaned_data.get('cardinality')
        if bottleneck and cardinality and bottleneck % cardinality:
            self.add_error('bottleneck', f'Bottleneck width must be divisible by cardinality {cardinality}.')

        scene_size = cleaned_data.get('scene_size')
        if scene_size and tile and scene_size < tile:
            self.add_error('scene_size', 'Synthetic scenes must be at least one tile wide.')

        return cleaned_data
