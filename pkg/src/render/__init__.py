from src.render.field_image import field_to_image, save_field_png, save_spectrum_png
